/*
 * Copyright (c) the mrdikit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef MRDIKIT_MIGRATE_HPP
#define MRDIKIT_MIGRATE_HPP

#include <zlib.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrdikit/document.hpp"
#include "mrdikit/errors.hpp"
#include "mrdikit/schema.hpp"
#include "mrdikit/value_tree.hpp"

namespace mrdikit {

inline constexpr const char* kToolNamespace = "mrdikit";
inline constexpr const char* kToolUrl = "https://github.com/mrdikit/mrdikit";
inline constexpr const char* kToolVersion = "0.1.0";

// version detection and chained upgrades

/// One migration edge. Version strings are opaque labels, never parsed
/// for ordering; the transform must keep the tree a parseable document.
struct UpgradeScript {
  std::string ns;
  std::string from_version;
  std::string to_version;
  std::function<ValueTree(ValueTree)> transform;
};

/// Registered upgrade edges, discovered by breadth-first search so the
/// applied chain is a shortest path. Registration order breaks ties.
class UpgradeRegistry {
 public:
  void add(UpgradeScript script) {
    if (!script.transform) throw UpgradeError("upgrade script needs a transform");
    scripts_.push_back(std::move(script));
  }
  std::size_t size() const noexcept { return scripts_.size(); }

  /// Scripts forming a shortest path from `from` to `to` within one
  /// namespace. Empty when from == to; UpgradeError when no path exists.
  std::vector<const UpgradeScript*> path(const std::string& ns,
                                         const std::string& from,
                                         const std::string& to) const {
    if (from == to) return {};
    std::map<std::string, const UpgradeScript*> arrived_by;
    std::deque<std::string> queue{from};
    arrived_by[from] = nullptr;
    while (!queue.empty() && !arrived_by.count(to)) {
      std::string at = std::move(queue.front());
      queue.pop_front();
      for (const UpgradeScript& s : scripts_) {
        if (s.ns != ns || s.from_version != at || arrived_by.count(s.to_version))
          continue;
        arrived_by[s.to_version] = &s;
        queue.push_back(s.to_version);
      }
    }
    auto it = arrived_by.find(to);
    if (it == arrived_by.end())
      throw UpgradeError("no upgrade path for namespace \"" + ns + "\" from " +
                         from + " to " + to);
    std::vector<const UpgradeScript*> chain;
    for (const UpgradeScript* s = it->second; s != nullptr;
         s = arrived_by.at(s->from_version))
      chain.push_back(s);
    return {chain.rbegin(), chain.rend()};
  }

 private:
  std::vector<UpgradeScript> scripts_;
};

inline std::string file_version(const Document& doc, const std::string& ns) {
  const NamespaceEntry* entry = doc.ns.find(ns);
  if (!entry)
    throw UpgradeError("namespace \"" + ns + "\" is absent from the document");
  return entry->version;
}

namespace detail {

inline ValueTree with_ns_version(ValueTree tree, const std::string& ns,
                                 const std::string& version) {
  const ValueTree* table = tree.find("_ns");
  if (!table || !table->is_map() || !table->contains(ns)) return tree;
  const ValueTree& old = *table->find(ns);
  ValueTree entry = ValueTree::array();
  entry.push_back(old.is_array() && old.size() >= 1 ? old.items()[0]
                                                    : ValueTree::text(""));
  entry.push_back(ValueTree::text(version));
  ValueTree patched = *table;
  patched.set(ns, std::move(entry));
  tree.set("_ns", std::move(patched));
  return tree;
}

}  // namespace detail

/// Chained upgrade: the registered scripts on a shortest path from the
/// file's version to target_version run in order, the namespace entry is
/// stamped with each hop's target, and the result must parse and conform
/// to the built-in document schema.
inline Document upgrade(const Document& doc, const std::string& ns,
                        const std::string& target_version,
                        const UpgradeRegistry& registry) {
  const std::string current = file_version(doc, ns);
  ValueTree tree = doc.to_tree();
  for (const UpgradeScript* s : registry.path(ns, current, target_version)) {
    tree = s->transform(std::move(tree));
    tree = detail::with_ns_version(std::move(tree), ns, s->to_version);
  }
  Document out;
  try {
    out = document_from_tree(tree);
  } catch (const Error& e) {
    throw UpgradeError(std::string("upgrade produced an unreadable document: ") +
                       e.what());
  }
  std::vector<Violation> violations = validate(tree, builtin_mrdi_schema());
  if (!violations.empty())
    throw UpgradeError("upgrade produced an invalid document: " +
                       violations.front().path + ": " +
                       violations.front().message);
  return out;
}

/// Namespace names claimed by the document but not by the reader. The
/// reader interprets what it understands and leaves the rest untouched.
inline std::vector<std::string> foreign_namespaces(
    const Document& doc, const std::vector<std::string>& known) {
  std::vector<std::string> out;
  for (const auto& [name, entry] : doc.ns) {
    bool ours = false;
    for (const auto& k : known) ours = ours || k == name;
    if (!ours) out.push_back(name);
  }
  return out;
}

// tree paths: "/" is the root, segments name map keys or array indices

inline std::vector<std::string> split_path(std::string_view path) {
  if (path.empty() || path == "/") return {};
  if (path.front() == '/') path.remove_prefix(1);
  std::vector<std::string> segments;
  while (!path.empty()) {
    std::size_t cut = path.find('/');
    std::string_view seg = path.substr(0, cut);
    if (seg.empty()) throw PathError("empty path segment");
    segments.emplace_back(seg);
    if (cut == std::string_view::npos) break;
    path.remove_prefix(cut + 1);
  }
  return segments;
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline const ValueTree& child_at(const ValueTree& node, const std::string& seg,
                                 const std::string& where) {
  if (node.is_map()) {
    if (const ValueTree* hit = node.find(seg)) return *hit;
    throw PathError("no key \"" + seg + "\" at " + where);
  }
  if (node.is_array()) {
    if (!all_digits(seg))
      throw PathError("array index expected at " + where + ", got \"" + seg +
                      "\"");
    std::size_t index = std::stoull(seg);
    if (index >= node.size())
      throw PathError("index " + seg + " out of range at " + where);
    return node.items()[index];
  }
  throw PathError("cannot descend into a scalar at " + where);
}

inline ValueTree replaced_at(const ValueTree& node,
                             const std::vector<std::string>& segments,
                             std::size_t depth, ValueTree replacement) {
  if (depth == segments.size()) return replacement;
  const std::string& seg = segments[depth];
  std::string where = "/";
  for (std::size_t i = 0; i < depth; ++i) where += segments[i] + "/";
  const ValueTree& child = child_at(node, seg, where);
  ValueTree next = replaced_at(child, segments, depth + 1, std::move(replacement));
  if (node.is_map()) {
    ValueTree out = node;
    out.set(seg, std::move(next));
    return out;
  }
  ValueTree out = ValueTree::array();
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(i == std::stoull(seg) ? std::move(next)
                                        : ValueTree(node.items()[i]));
  return out;
}

}  // namespace detail

inline const ValueTree& tree_at_path(const ValueTree& root,
                                     std::string_view path) {
  const ValueTree* node = &root;
  std::string where = "/";
  for (const std::string& seg : split_path(path)) {
    node = &detail::child_at(*node, seg, where);
    where += seg + "/";
  }
  return *node;
}

// deflate + base64 payload plumbing

namespace detail {

inline std::string deflate_bytes(std::string_view input) {
  uLongf bound = compressBound(static_cast<uLong>(input.size()));
  std::string out(bound, '\0');
  int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                     reinterpret_cast<const Bytef*>(input.data()),
                     static_cast<uLong>(input.size()), Z_BEST_COMPRESSION);
  if (rc != Z_OK) throw CodecError("deflate failed");
  out.resize(bound);
  return out;
}

inline std::string inflate_bytes(std::string_view input) {
  uLongf capacity = std::max<uLongf>(64, static_cast<uLongf>(input.size()) * 4);
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::string out(capacity, '\0');
    uLongf written = capacity;
    int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &written,
                        reinterpret_cast<const Bytef*>(input.data()),
                        static_cast<uLong>(input.size()));
    if (rc == Z_OK) {
      out.resize(written);
      return out;
    }
    if (rc != Z_BUF_ERROR) throw CodecError("inflate failed: corrupt payload");
    capacity *= 2;
  }
  throw CodecError("inflate failed: payload expands beyond sane bounds");
}

inline constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    std::uint32_t n = (static_cast<unsigned char>(bytes[i]) << 16) |
                      (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                      static_cast<unsigned char>(bytes[i + 2]);
    out += kBase64Alphabet[(n >> 18) & 63];
    out += kBase64Alphabet[(n >> 12) & 63];
    out += kBase64Alphabet[(n >> 6) & 63];
    out += kBase64Alphabet[n & 63];
    i += 3;
  }
  std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    std::uint32_t n = static_cast<unsigned char>(bytes[i]) << 16;
    out += kBase64Alphabet[(n >> 18) & 63];
    out += kBase64Alphabet[(n >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    std::uint32_t n = (static_cast<unsigned char>(bytes[i]) << 16) |
                      (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += kBase64Alphabet[(n >> 18) & 63];
    out += kBase64Alphabet[(n >> 12) & 63];
    out += kBase64Alphabet[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

inline std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0)
    throw CodecError("corrupt base64 payload: length not a multiple of four");
  int reverse[256];
  for (int& v : reverse) v = -1;
  for (int i = 0; i < 64; ++i)
    reverse[static_cast<unsigned char>(kBase64Alphabet[i])] = i;
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pads = 0;
    for (int j = 0; j < 4; ++j) {
      char c = text[i + j];
      if (c == '=') {
        if (i + 4 != text.size() || j < 2)
          throw CodecError("corrupt base64 payload: misplaced padding");
        ++pads;
        vals[j] = 0;
        continue;
      }
      if (pads > 0 || reverse[static_cast<unsigned char>(c)] < 0)
        throw CodecError("corrupt base64 payload: invalid character");
      vals[j] = reverse[static_cast<unsigned char>(c)];
    }
    std::uint32_t n = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out += static_cast<char>((n >> 16) & 0xff);
    if (pads < 2) out += static_cast<char>((n >> 8) & 0xff);
    if (pads < 1) out += static_cast<char>(n & 0xff);
  }
  return out;
}

inline bool contains_compressed_node(const ValueTree& t) {
  if (t.is_map()) {
    if (const ValueTree* type = t.find("_type"))
      if (type->is_text() && type->as_text() == "CompressedTree") return true;
    for (const auto& [k, v] : t.entries())
      if (contains_compressed_node(v)) return true;
  } else if (t.is_array()) {
    for (const auto& v : t.items())
      if (contains_compressed_node(v)) return true;
  }
  return false;
}

}  // namespace detail

inline constexpr const char* kCompressedTypeName = "CompressedTree";

/// A subtree folded into a {"_type": "CompressedTree", "codec": "deflate",
/// "payload": base64} marker node, itself plain JSON.
inline ValueTree compress_tree(const ValueTree& subtree) {
  ValueTree marker = ValueTree::map();
  marker.set("_type", ValueTree::text(kCompressedTypeName));
  marker.set("codec", ValueTree::text("deflate"));
  marker.set("payload",
             ValueTree::text(detail::base64_encode(detail::deflate_bytes(
                 emit_tree(subtree, EmitStyle::Compact)))));
  return marker;
}

/// Inverse of compress_tree; errors on anything but a well-formed marker.
inline ValueTree decompress_tree(const ValueTree& marker) {
  if (!marker.is_map() || !marker.contains("_type") ||
      !marker.find("_type")->is_text() ||
      marker.find("_type")->as_text() != kCompressedTypeName)
    throw PathError("node is not a CompressedTree marker");
  const ValueTree* codec = marker.find("codec");
  if (!codec || !codec->is_text() || codec->as_text() != "deflate")
    throw CodecError("unsupported compression codec");
  const ValueTree* payload = marker.find("payload");
  if (!payload || !payload->is_text())
    throw CodecError("CompressedTree marker lacks a payload");
  return parse_tree(
      detail::inflate_bytes(detail::base64_decode(payload->as_text())));
}

namespace detail {

inline Document document_from_patched_tree(const ValueTree& tree,
                                           const char* action) {
  try {
    Document out = document_from_tree(tree);
    std::vector<Violation> violations = validate(tree, builtin_mrdi_schema());
    if (!violations.empty())
      throw DocumentError(violations.front().rule + ": " +
                              violations.front().message,
                          violations.front().path);
    return out;
  } catch (const PathError&) {
    throw;
  } catch (const Error& e) {
    throw PathError(std::string(action) +
                    " at this path breaks document validity: " + e.what());
  }
}

}  // namespace detail

/// The document with the subtree at `path` replaced by its compression
/// marker. The tool's namespace is recorded in _ns so foreign readers can
/// recognize and skip the marker convention.
inline Document compress_subtree(const Document& doc, std::string_view path) {
  std::vector<std::string> segments = split_path(path);
  if (segments.empty())
    throw PathError("the document root cannot be replaced by a marker");
  ValueTree tree = doc.to_tree();
  ValueTree marker = compress_tree(tree_at_path(tree, path));
  tree = detail::replaced_at(tree, segments, 0, std::move(marker));
  ValueTree* table = tree.find("_ns");
  if (table && table->is_map() && !table->contains(kToolNamespace)) {
    ValueTree entry = ValueTree::array();
    entry.push_back(ValueTree::text(kToolUrl));
    entry.push_back(ValueTree::text(kToolVersion));
    ValueTree patched = *table;
    patched.set(kToolNamespace, std::move(entry));
    tree.set("_ns", std::move(patched));
  }
  return detail::document_from_patched_tree(tree, "compressing");
}

/// Inverse of compress_subtree. Once the last marker is gone the tool's
/// namespace entry is dropped again, restoring the original document.
inline Document decompress_subtree(const Document& doc, std::string_view path) {
  std::vector<std::string> segments = split_path(path);
  if (segments.empty())
    throw PathError("the document root cannot be a marker");
  ValueTree tree = doc.to_tree();
  ValueTree restored = decompress_tree(tree_at_path(tree, path));
  tree = detail::replaced_at(tree, segments, 0, std::move(restored));
  ValueTree* table = tree.find("_ns");
  if (table && table->is_map() && table->contains(kToolNamespace) &&
      !detail::contains_compressed_node(tree)) {
    ValueTree patched = *table;
    patched.erase(kToolNamespace);
    tree.set("_ns", std::move(patched));
  }
  return detail::document_from_patched_tree(tree, "decompressing");
}

// legacy layout support

namespace detail {

inline ValueTree rename_type_names(ValueTree t,
                                   const std::map<std::string, std::string>& table) {
  if (t.is_map()) {
    ValueTree out = ValueTree::map();
    for (const auto& [k, v] : t.entries()) {
      ValueTree child = rename_type_names(v, table);
      if ((k == "_type" || k == "name") && child.is_text()) {
        auto hit = table.find(child.as_text());
        if (hit != table.end()) child = ValueTree::text(hit->second);
      }
      out.set(k, std::move(child));
    }
    return out;
  }
  if (t.is_array()) {
    ValueTree out = ValueTree::array();
    for (const auto& v : t.items()) out.push_back(rename_type_names(v, table));
    return out;
  }
  return t;
}

inline ValueTree wrap_bare_symbols(ValueTree t) {
  if (t.is_map()) {
    ValueTree out = ValueTree::map();
    for (const auto& [k, v] : t.entries()) {
      ValueTree child = wrap_bare_symbols(v);
      if (k == "symbols" && child.is_text()) {
        ValueTree arr = ValueTree::array();
        arr.push_back(std::move(child));
        child = std::move(arr);
      }
      out.set(k, std::move(child));
    }
    return out;
  }
  if (t.is_array()) {
    ValueTree out = ValueTree::array();
    for (const auto& v : t.items()) out.push_back(wrap_bare_symbols(v));
    return out;
  }
  return t;
}

}  // namespace detail

/// Upgrade edges for two historical Oscar layouts: 0.11.0 wrote a ring's
/// lone symbol as a bare string, and 0.12.0 still used element type names
/// without the "Ring" infix.
inline void register_legacy_oscar_scripts(UpgradeRegistry& registry) {
  registry.add(UpgradeScript{
      "Oscar", "0.11.0", "0.12.0",
      [](ValueTree t) { return detail::wrap_bare_symbols(std::move(t)); }});
  registry.add(UpgradeScript{
      "Oscar", "0.12.0", "0.13.0-DEV", [](ValueTree t) {
        static const std::map<std::string, std::string> renames{
            {"MPolyElem", "MPolyRingElem"},
            {"PolyElem", "PolyRingElem"},
            {"fqPolyRepElem", "fqPolyRepFieldElem"}};
        return detail::rename_type_names(std::move(t), renames);
      }});
}

}  // namespace mrdikit

#endif  // MRDIKIT_MIGRATE_HPP
