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
#ifndef MRDIKIT_DOCUMENT_HPP
#define MRDIKIT_DOCUMENT_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrdikit/errors.hpp"
#include "mrdikit/uuid.hpp"
#include "mrdikit/value_tree.hpp"

namespace mrdikit {

/// String-keyed map that remembers insertion order.
template <typename T>
class OrderedMap {
 public:
  using Item = std::pair<std::string, T>;

  const T* find(std::string_view key) const {
    for (const auto& [k, v] : items_)
      if (k == key) return &v;
    return nullptr;
  }
  T* find(std::string_view key) {
    for (auto& [k, v] : items_)
      if (k == key) return &v;
    return nullptr;
  }
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  T& insert_new(std::string key, T value) {
    if (contains(key)) throw Error("duplicate key \"" + key + "\"");
    items_.emplace_back(std::move(key), std::move(value));
    return items_.back().second;
  }
  void set(std::string key, T value) {
    if (T* existing = find(key)) {
      *existing = std::move(value);
      return;
    }
    items_.emplace_back(std::move(key), std::move(value));
  }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  auto begin() { return items_.begin(); }
  auto end() { return items_.end(); }
  const Item& at_index(std::size_t i) const { return items_[i]; }

  friend bool operator==(const OrderedMap& a, const OrderedMap& b) {
    return a.items_ == b.items_;
  }

 private:
  std::vector<Item> items_;
};

/// A serialized type: either a bare name, or a name plus parameters.
/// Parameters are restricted to a string (usually a UUID), an array, or an
/// object. A descriptor without parameters serializes as a plain string;
/// with parameters, as {"name": ..., "params": ...} with "name" first.
/// Both key orders are accepted on input.
struct TypeDescriptor {
  std::string name;
  std::optional<ValueTree> params;

  friend bool operator==(const TypeDescriptor& a, const TypeDescriptor& b) {
    return a.name == b.name && a.params == b.params;
  }

  ValueTree to_tree() const {
    if (!params) return ValueTree::text(name);
    ValueTree m = ValueTree::map();
    m.set("name", ValueTree::text(name));
    m.set("params", *params);
    return m;
  }

  static TypeDescriptor from_tree(const ValueTree& t, const std::string& path) {
    if (t.is_text()) return TypeDescriptor{t.as_text(), std::nullopt};
    if (!t.is_map())
      throw DocumentError("type descriptor must be a string or an object",
                          path);
    TypeDescriptor d;
    bool have_name = false;
    for (const auto& [k, v] : t.entries()) {
      if (k == "name") {
        if (!v.is_text())
          throw DocumentError("type name must be a string", path + "/name");
        d.name = v.as_text();
        have_name = true;
      } else if (k == "params") {
        if (!v.is_text() && !v.is_array() && !v.is_map())
          throw DocumentError(
              "type params must be an object, a string, or an array",
              path + "/params");
        d.params = v;
      } else {
        throw DocumentError("unexpected key \"" + k + "\" in type descriptor",
                            path);
      }
    }
    if (!have_name)
      throw DocumentError("type descriptor object lacks \"name\"", path);
    return d;
  }
};

struct NamespaceEntry {
  std::string url;
  std::string version;
  friend bool operator==(const NamespaceEntry&, const NamespaceEntry&) = default;
};

using NamespaceTable = OrderedMap<NamespaceEntry>;

/// One entry of the global reference table: the serialized form of a type
/// parameter (in practice, a ring). Never carries a reference table of its
/// own; all references live in the single top-level table.
struct RefEntry {
  TypeDescriptor type_desc;
  std::optional<ValueTree> data;
  /// Unknown entry-level keys, preserved verbatim in original order.
  std::vector<std::pair<std::string, ValueTree>> extras;

  friend bool operator==(const RefEntry&, const RefEntry&) = default;
};

struct Metadata {
  std::optional<std::string> name;
  std::optional<std::string> author_orcid;
  std::vector<std::pair<std::string, ValueTree>> extras;

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

/// True iff `s` looks like an ORCID iD: dddd-dddd-dddd-ddd(d|X).
inline bool is_orcid(std::string_view s) {
  if (s.size() != 19) return false;
  for (std::size_t i = 0; i < 19; ++i) {
    if (i == 4 || i == 9 || i == 14) {
      if (s[i] != '-') return false;
    } else if (i == 18) {
      if (!(s[i] >= '0' && s[i] <= '9') && s[i] != 'X') return false;
    } else if (s[i] < '0' || s[i] > '9') {
      return false;
    }
  }
  return true;
}

/// An in-memory mrdi document: namespace table, type descriptor, optional
/// data payload, reference table keyed by UUID, optional metadata. Unknown
/// top-level keys are preserved and re-emitted after the known ones.
///
/// Documents are immutable by convention after construction and safe to
/// share across concurrent readers; parsing and emission are pure.
struct Document {
  NamespaceTable ns;
  TypeDescriptor type_desc;
  std::optional<ValueTree> data;
  OrderedMap<RefEntry> refs;
  std::optional<Metadata> meta;
  std::vector<std::pair<std::string, ValueTree>> extras;

  ValueTree to_tree() const;
  void verify() const;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Collects every string value in the tree matching the canonical UUID
/// format. Map keys are not scanned; only text nodes count as mentions.
inline void collect_uuid_mentions_into(const ValueTree& t,
                                       std::set<std::string>& out) {
  switch (t.kind()) {
    case ValueTree::Kind::Text:
      if (is_uuid(t.as_text())) out.insert(t.as_text());
      return;
    case ValueTree::Kind::Array:
      for (const auto& item : t.items()) collect_uuid_mentions_into(item, out);
      return;
    case ValueTree::Kind::Map:
      for (const auto& [k, v] : t.entries()) collect_uuid_mentions_into(v, out);
      return;
    default:
      return;
  }
}

inline std::set<std::string> collect_uuid_mentions(const ValueTree& t) {
  std::set<std::string> out;
  collect_uuid_mentions_into(t, out);
  return out;
}

/// UUIDs mentioned by one reference entry (in its type params or data).
inline std::set<std::string> ref_entry_mentions(const RefEntry& e) {
  std::set<std::string> out;
  if (e.type_desc.params) collect_uuid_mentions_into(*e.type_desc.params, out);
  if (e.data) collect_uuid_mentions_into(*e.data, out);
  return out;
}

/// Topological order of the reference table: every UUID appears after all
/// UUIDs it mentions, so dependencies come first. Deterministic: ties are
/// broken by table insertion order. Throws DocumentError listing the
/// offending UUIDs when the mention graph has a cycle.
inline std::vector<std::string> ref_dependency_order(const Document& doc) {
  const std::size_t n = doc.refs.size();
  std::vector<std::string> keys(n);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = doc.refs.at_index(i).first;
    index[keys[i]] = i;
  }
  // deps[i] = indices i mentions; out_edges[j] = who mentions j
  std::vector<std::vector<std::size_t>> dependents(n);
  std::vector<std::size_t> pending(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& m : ref_entry_mentions(doc.refs.at_index(i).second)) {
      auto it = index.find(m);
      if (it == index.end() || it->second == i) {
        if (it != index.end() && it->second == i)
          throw DocumentError("reference cycle: " + keys[i] + " -> " + keys[i],
                              "/_refs/" + keys[i]);
        continue;  // dangling mentions are reported by verify()
      }
      dependents[it->second].push_back(i);
      ++pending[i];
    }
  }
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (pending[i] == 0) ready.push_back(i);
  std::vector<std::string> order;
  order.reserve(n);
  std::vector<bool> done(n, false);
  while (!ready.empty()) {
    std::size_t i = ready.front();
    ready.pop_front();
    done[i] = true;
    order.push_back(keys[i]);
    for (std::size_t j : dependents[i])
      if (--pending[j] == 0) ready.push_back(j);
  }
  if (order.size() != n) {
    std::string cycle;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i]) {
        if (!cycle.empty()) cycle += ", ";
        cycle += keys[i];
      }
    }
    throw DocumentError("reference cycle among: " + cycle, "/_refs");
  }
  return order;
}

namespace detail {

inline NamespaceTable namespace_table_from_tree(const ValueTree& t,
                                                const std::string& path) {
  if (!t.is_map())
    throw DocumentError("_ns must be an object", path);
  NamespaceTable ns;
  for (const auto& [name, entry] : t.entries()) {
    const std::string epath = path + "/" + name;
    if (!entry.is_array() || entry.size() != 2 || !entry.items()[0].is_text() ||
        !entry.items()[1].is_text())
      throw DocumentError(
          "namespace entry must be a two-element [url, version] array", epath);
    ns.insert_new(name, NamespaceEntry{entry.items()[0].as_text(),
                                       entry.items()[1].as_text()});
  }
  return ns;
}

inline Metadata metadata_from_tree(const ValueTree& t, const std::string& path) {
  if (!t.is_map()) throw DocumentError("_meta must be an object", path);
  Metadata meta;
  for (const auto& [k, v] : t.entries()) {
    if (k == "name") {
      if (!v.is_text())
        throw DocumentError("metadata name must be a string", path + "/name");
      meta.name = v.as_text();
    } else if (k == "author_orcid") {
      if (!v.is_text() || !is_orcid(v.as_text()))
        throw DocumentError(
            "author_orcid must match dddd-dddd-dddd-ddd(d|X)",
            path + "/author_orcid");
      meta.author_orcid = v.as_text();
    } else {
      meta.extras.emplace_back(k, v);
    }
  }
  return meta;
}

inline RefEntry ref_entry_from_tree(const ValueTree& t, const std::string& path) {
  if (!t.is_map())
    throw DocumentError("reference entry must be an object", path);
  RefEntry e;
  bool have_type = false;
  for (const auto& [k, v] : t.entries()) {
    if (k == "_type") {
      e.type_desc = TypeDescriptor::from_tree(v, path + "/_type");
      have_type = true;
    } else if (k == "data") {
      e.data = v;
    } else if (k == "_refs") {
      throw DocumentError(
          "reference entries may not carry their own _refs table; "
          "all references belong to the top-level table",
          path + "/_refs");
    } else {
      e.extras.emplace_back(k, v);
    }
  }
  if (!have_type)
    throw DocumentError("reference entry lacks required _type", path);
  return e;
}

}  // namespace detail

/// Builds a Document from an already-parsed tree and checks every
/// structural invariant. Top-level value must be an object with `_type`.
inline Document document_from_tree(const ValueTree& tree) {
  if (!tree.is_map())
    throw DocumentError("document must be a JSON object", "/");
  Document doc;
  bool have_type = false;
  for (const auto& [key, value] : tree.entries()) {
    if (key == "_ns") {
      doc.ns = detail::namespace_table_from_tree(value, "/_ns");
    } else if (key == "_type") {
      doc.type_desc = TypeDescriptor::from_tree(value, "/_type");
      have_type = true;
    } else if (key == "data") {
      doc.data = value;
    } else if (key == "_refs") {
      if (!value.is_map())
        throw DocumentError("_refs must be an object", "/_refs");
      for (const auto& [uuid, entry] : value.entries()) {
        const std::string epath = "/_refs/" + uuid;
        if (!is_uuid(uuid))
          throw DocumentError(
              "_refs key is not a canonical lowercase UUID", epath);
        doc.refs.insert_new(uuid, detail::ref_entry_from_tree(entry, epath));
      }
    } else if (key == "_meta") {
      doc.meta = detail::metadata_from_tree(value, "/_meta");
    } else {
      doc.extras.emplace_back(key, value);
    }
  }
  if (!have_type)
    throw DocumentError("document lacks required _type", "/");
  doc.verify();
  return doc;
}

/// Parses `.mrdi` text. Number tokens are preserved verbatim; unknown
/// top-level keys and unknown-namespace subtrees are retained untouched.
inline Document parse_document(std::string_view text) {
  return document_from_tree(parse_tree(text));
}

inline ValueTree Document::to_tree() const {
  ValueTree root = ValueTree::map();
  if (!ns.empty()) {
    ValueTree nst = ValueTree::map();
    for (const auto& [name, entry] : ns) {
      ValueTree pair = ValueTree::array();
      pair.push_back(ValueTree::text(entry.url));
      pair.push_back(ValueTree::text(entry.version));
      nst.set(name, std::move(pair));
    }
    root.set("_ns", std::move(nst));
  }
  root.set("_type", type_desc.to_tree());
  if (data) root.set("data", *data);
  if (!refs.empty()) {
    ValueTree rt = ValueTree::map();
    for (const auto& [uuid, entry] : refs) {
      ValueTree et = ValueTree::map();
      et.set("_type", entry.type_desc.to_tree());
      if (entry.data) et.set("data", *entry.data);
      for (const auto& [k, v] : entry.extras) et.set(k, v);
      rt.set(uuid, std::move(et));
    }
    root.set("_refs", std::move(rt));
  }
  if (meta) {
    ValueTree mt = ValueTree::map();
    if (meta->name) mt.set("name", ValueTree::text(*meta->name));
    if (meta->author_orcid)
      mt.set("author_orcid", ValueTree::text(*meta->author_orcid));
    for (const auto& [k, v] : meta->extras) mt.set(k, v);
    root.set("_meta", std::move(mt));
  }
  for (const auto& [k, v] : extras) root.set(k, v);
  return root;
}

inline void Document::verify() const {
  if (type_desc.name.empty())
    throw DocumentError("type descriptor has an empty name", "/_type");
  if (type_desc.params && !type_desc.params->is_text() &&
      !type_desc.params->is_array() && !type_desc.params->is_map())
    throw DocumentError("type params must be an object, a string, or an array",
                        "/_type/params");
  if (meta && meta->author_orcid && !is_orcid(*meta->author_orcid))
    throw DocumentError("author_orcid must match dddd-dddd-dddd-ddd(d|X)",
                        "/_meta/author_orcid");
  for (const auto& [uuid, entry] : refs) {
    if (!is_uuid(uuid))
      throw DocumentError("_refs key is not a canonical lowercase UUID",
                          "/_refs/" + uuid);
    for (const auto& [k, v] : entry.extras)
      if (k == "_refs")
        throw DocumentError(
            "reference entries may not carry their own _refs table",
            "/_refs/" + uuid + "/_refs");
  }
  // dangling mentions: every UUID mentioned in the type descriptor, the
  // data payload or a reference entry must be a key of _refs
  auto check_mentions = [&](const std::set<std::string>& mentions,
                            const std::string& where) {
    for (const auto& m : mentions)
      if (!refs.contains(m))
        throw DocumentError("UUID " + m + " is mentioned but not defined in _refs",
                            where);
  };
  std::set<std::string> top;
  if (type_desc.params) collect_uuid_mentions_into(*type_desc.params, top);
  check_mentions(top, "/_type");
  if (data) check_mentions(collect_uuid_mentions(*data), "/data");
  for (const auto& [uuid, entry] : refs)
    check_mentions(ref_entry_mentions(entry), "/_refs/" + uuid);
  ref_dependency_order(*this);  // throws on cycles
}

/// Canonical emission. Top-level key order is _ns, _type, data, _refs,
/// _meta, then preserved foreign keys; descriptor objects put "name" before
/// "params"; reference entries keep their stored insertion order. An empty
/// namespace or reference table is omitted entirely.
inline std::string emit_document(const Document& doc,
                                 EmitStyle style = EmitStyle::Pretty) {
  return emit_tree(doc.to_tree(), style);
}

}  // namespace mrdikit

#endif  // MRDIKIT_DOCUMENT_HPP
