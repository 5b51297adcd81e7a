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
#ifndef MRDIKIT_SCHEMA_HPP
#define MRDIKIT_SCHEMA_HPP

#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrdikit/errors.hpp"
#include "mrdikit/uuid.hpp"
#include "mrdikit/value_tree.hpp"

namespace mrdikit {

/// One compiled schema node. Supports a deliberate subset of JSON Schema:
/// type (object/string/array/number), properties, patternProperties,
/// required, oneOf, $ref ("#" or "#/$defs/<name>"), $defs, and
/// format ("uuid"). $id and $schema are recognized and skipped; any other
/// keyword is ignored with a warning recorded at compile time.
struct SchemaNode {
  struct Pattern;  // completed right below; vector allows the forward use

  std::optional<std::string> type;
  std::vector<std::pair<std::string, SchemaNode>> properties;
  std::vector<Pattern> pattern_properties;
  std::vector<std::string> required;
  std::vector<SchemaNode> one_of;
  std::optional<std::string> ref;
  std::vector<std::pair<std::string, SchemaNode>> defs;
  std::optional<std::string> format;
};

struct SchemaNode::Pattern {
  std::string source;
  std::regex re;  // ECMAScript grammar, applied with regex_search
  SchemaNode node;
};

/// A compiled, immutable schema. References resolve against the root
/// node's $defs table; compilation guarantees they resolve.
struct Schema {
  SchemaNode root;
  std::vector<std::string> warnings;

  const SchemaNode* find_def(std::string_view name) const {
    for (const auto& [n, node] : root.defs)
      if (n == name) return &node;
    return nullptr;
  }
};

struct Violation {
  std::string path;  // slash-separated into the validated tree, "/" = root
  std::string rule;
  std::string message;
};

namespace detail {

inline const char* schema_type_names[] = {"object", "string", "array",
                                          "number"};

inline bool is_schema_type_name(std::string_view s) {
  for (const char* n : schema_type_names)
    if (s == n) return true;
  return false;
}

inline SchemaNode compile_schema_node(const ValueTree& tree,
                                      const std::string& path,
                                      std::vector<std::string>& warnings) {
  if (!tree.is_map())
    throw SchemaError("schema node at " + path + " must be an object");
  SchemaNode node;
  for (const auto& [key, value] : tree.entries()) {
    if (key == "type") {
      if (!value.is_text() || !is_schema_type_name(value.as_text()))
        throw SchemaError("type at " + path +
                          " must be one of object, string, array, number");
      node.type = value.as_text();
    } else if (key == "properties") {
      if (!value.is_map())
        throw SchemaError("properties at " + path + " must be an object");
      for (const auto& [name, sub] : value.entries())
        node.properties.emplace_back(
            name, compile_schema_node(sub, path + "/properties/" + name,
                                      warnings));
    } else if (key == "patternProperties") {
      if (!value.is_map())
        throw SchemaError("patternProperties at " + path +
                          " must be an object");
      for (const auto& [pattern, sub] : value.entries()) {
        SchemaNode::Pattern p;
        p.source = pattern;
        try {
          p.re = std::regex(pattern);
        } catch (const std::regex_error& e) {
          throw SchemaError("invalid regex \"" + pattern + "\" at " + path +
                            ": " + e.what());
        }
        p.node = compile_schema_node(
            sub, path + "/patternProperties/" + pattern, warnings);
        node.pattern_properties.push_back(std::move(p));
      }
    } else if (key == "required") {
      if (!value.is_array())
        throw SchemaError("required at " + path + " must be an array");
      for (const auto& item : value.items()) {
        if (!item.is_text())
          throw SchemaError("required at " + path +
                            " must list property names as strings");
        node.required.push_back(item.as_text());
      }
    } else if (key == "oneOf") {
      if (!value.is_array() || value.size() == 0)
        throw SchemaError("oneOf at " + path + " must be a non-empty array");
      for (std::size_t i = 0; i < value.size(); ++i)
        node.one_of.push_back(
            compile_schema_node(value.items()[i],
                                path + "/oneOf/" + std::to_string(i),
                                warnings));
    } else if (key == "$ref") {
      if (!value.is_text())
        throw SchemaError("$ref at " + path + " must be a string");
      node.ref = value.as_text();
    } else if (key == "$defs") {
      if (!value.is_map())
        throw SchemaError("$defs at " + path + " must be an object");
      for (const auto& [name, sub] : value.entries())
        node.defs.emplace_back(
            name,
            compile_schema_node(sub, path + "/$defs/" + name, warnings));
    } else if (key == "format") {
      if (!value.is_text())
        throw SchemaError("format at " + path + " must be a string");
      node.format = value.as_text();
      if (*node.format != "uuid")
        warnings.push_back(path + ": unsupported format \"" + *node.format +
                           "\" is not checked");
    } else if (key == "$id" || key == "$schema") {
      // structural no-ops in this subset
    } else {
      warnings.push_back(path + ": ignored unknown keyword \"" + key + "\"");
    }
  }
  return node;
}

inline void check_refs_resolve(const SchemaNode& node, const Schema& schema,
                               const std::string& path) {
  if (node.ref) {
    const std::string& r = *node.ref;
    if (r != "#") {
      constexpr std::string_view prefix = "#/$defs/";
      if (r.rfind(prefix, 0) != 0 ||
          schema.find_def(std::string_view(r).substr(prefix.size())) == nullptr)
        throw SchemaError("unresolvable $ref \"" + r + "\" at " + path);
    }
  }
  for (const auto& [name, sub] : node.properties)
    check_refs_resolve(sub, schema, path + "/properties/" + name);
  for (const auto& p : node.pattern_properties)
    check_refs_resolve(p.node, schema,
                       path + "/patternProperties/" + p.source);
  for (std::size_t i = 0; i < node.one_of.size(); ++i)
    check_refs_resolve(node.one_of[i], schema,
                       path + "/oneOf/" + std::to_string(i));
  for (const auto& [name, sub] : node.defs)
    check_refs_resolve(sub, schema, path + "/$defs/" + name);
}

inline const char* tree_kind_label(const ValueTree& t) {
  switch (t.kind()) {
    case ValueTree::Kind::Null: return "null";
    case ValueTree::Kind::Boolean: return "boolean";
    case ValueTree::Kind::Number: return "number";
    case ValueTree::Kind::Text: return "string";
    case ValueTree::Kind::Array: return "array";
    case ValueTree::Kind::Map: return "object";
  }
  return "unknown";
}

inline bool kind_matches(const ValueTree& t, std::string_view type_name) {
  switch (t.kind()) {
    case ValueTree::Kind::Map: return type_name == "object";
    case ValueTree::Kind::Text: return type_name == "string";
    case ValueTree::Kind::Array: return type_name == "array";
    case ValueTree::Kind::Number: return type_name == "number";
    default: return false;
  }
}

inline void validate_node(const ValueTree& tree, const SchemaNode& node,
                          const Schema& schema, const std::string& path,
                          std::set<const SchemaNode*>& seen,
                          std::vector<Violation>& out);

/// True iff the tree satisfies the node with no violations. Used for
/// oneOf branches, whose individual violations are not reported.
inline bool branch_conforms(const ValueTree& tree, const SchemaNode& node,
                            const Schema& schema, const std::string& path,
                            std::set<const SchemaNode*>& seen) {
  std::vector<Violation> scratch;
  validate_node(tree, node, schema, path, seen, scratch);
  return scratch.empty();
}

inline void validate_node(const ValueTree& tree, const SchemaNode& node,
                          const Schema& schema, const std::string& path,
                          std::set<const SchemaNode*>& seen,
                          std::vector<Violation>& out) {
  const std::string at = path.empty() ? "/" : path;
  if (node.ref) {
    const SchemaNode* target = nullptr;
    if (*node.ref == "#") {
      target = &schema.root;
    } else {
      target = schema.find_def(
          std::string_view(*node.ref).substr(std::string_view("#/$defs/").size()));
    }
    // a ref chain revisiting a node on the same tree position adds nothing
    if (target != nullptr && seen.insert(target).second) {
      validate_node(tree, *target, schema, path, seen, out);
      seen.erase(target);
    }
  }
  if (node.type && !kind_matches(tree, *node.type)) {
    out.push_back({at, "type",
                   "expected " + *node.type + ", found " +
                       tree_kind_label(tree)});
  }
  if (!node.required.empty() && tree.is_map()) {
    for (const auto& name : node.required)
      if (!tree.contains(name))
        out.push_back({at, "required",
                       "missing required property \"" + name + "\""});
  }
  if (tree.is_map()) {
    for (const auto& [key, value] : tree.entries()) {
      const std::string child = path + "/" + key;
      for (const auto& [name, sub] : node.properties) {
        if (name == key) {
          std::set<const SchemaNode*> fresh;
          validate_node(value, sub, schema, child, fresh, out);
        }
      }
      for (const auto& p : node.pattern_properties) {
        if (std::regex_search(key, p.re)) {
          std::set<const SchemaNode*> fresh;
          validate_node(value, p.node, schema, child, fresh, out);
        }
      }
    }
  }
  if (!node.one_of.empty()) {
    int matches = 0;
    for (const auto& branch : node.one_of)
      if (branch_conforms(tree, branch, schema, path, seen)) ++matches;
    if (matches != 1)
      out.push_back({at, "oneOf",
                     matches == 0
                         ? "no oneOf branch matched"
                         : std::to_string(matches) +
                               " oneOf branches matched, expected exactly one"});
  }
  if (node.format && *node.format == "uuid") {
    if (tree.is_text() && !is_uuid(tree.as_text())) {
      out.push_back({at, "format",
                     "\"" + tree.as_text() + "\" does not match the uuid "
                     "format"});
    } else if (tree.is_map()) {
      for (const auto& [key, value] : tree.entries())
        if (!is_uuid(key))
          out.push_back({at, "format",
                         "key \"" + key + "\" does not match the uuid "
                         "format"});
    }
  }
}

}  // namespace detail

/// Compiles a schema tree. Unknown keywords become warnings on the result;
/// an unresolvable $ref or a non-compiling regex throws SchemaError.
inline Schema compile_schema(const ValueTree& tree) {
  Schema schema;
  schema.root = detail::compile_schema_node(tree, "#", schema.warnings);
  detail::check_refs_resolve(schema.root, schema, "#");
  return schema;
}

/// Validates a tree. Pure and deterministic: violations appear in
/// depth-first document order. An empty result means the tree conforms.
inline std::vector<Violation> validate(const ValueTree& tree,
                                       const Schema& schema) {
  std::vector<Violation> out;
  std::set<const SchemaNode*> seen;
  detail::validate_node(tree, schema.root, schema, "", seen, out);
  return out;
}

/// The built-in document schema, as its JSON source text.
inline const std::string& builtin_mrdi_schema_text() {
  static const std::string text = R"json({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "https://mrdikit.dev/mrdi.schema.json",
  "type": "object",
  "required": ["_type"],
  "properties": {
    "_ns": {
      "type": "object",
      "patternProperties": {
        ".*": {"type": "array"}
      }
    },
    "_type": {"$ref": "#/$defs/type_descriptor"},
    "data": {},
    "_refs": {
      "type": "object",
      "format": "uuid",
      "patternProperties": {
        "^[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$": {
          "$ref": "#/$defs/ref_entry"
        }
      }
    },
    "_meta": {
      "type": "object",
      "properties": {
        "name": {"type": "string"},
        "author_orcid": {"type": "string"}
      }
    }
  },
  "$defs": {
    "type_descriptor": {
      "oneOf": [
        {"type": "string"},
        {
          "type": "object",
          "required": ["name"],
          "properties": {
            "name": {"type": "string"},
            "params": {
              "oneOf": [
                {"type": "object"},
                {"type": "string"},
                {"type": "array"}
              ]
            }
          }
        }
      ]
    },
    "ref_entry": {
      "type": "object",
      "required": ["_type"],
      "properties": {
        "_type": {"$ref": "#/$defs/type_descriptor"},
        "data": {}
      }
    }
  }
})json";
  return text;
}

/// The built-in document schema, compiled once and shared.
inline const Schema& builtin_mrdi_schema() {
  static const Schema schema = compile_schema(parse_tree(builtin_mrdi_schema_text()));
  return schema;
}

}  // namespace mrdikit

#endif  // MRDIKIT_SCHEMA_HPP
