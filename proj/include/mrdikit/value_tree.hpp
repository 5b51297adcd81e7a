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
#ifndef MRDIKIT_VALUE_TREE_HPP
#define MRDIKIT_VALUE_TREE_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrdikit/errors.hpp"

namespace mrdikit {

/// Generic structured tree mirroring an on-disk JSON document.
///
/// Two properties distinguish it from an off-the-shelf JSON value type:
///   - numbers keep their exact source token; nothing is ever converted to
///     floating point, so a 200-digit integer survives a round trip;
///   - maps preserve insertion order and reject duplicate keys.
class ValueTree {
 public:
  enum class Kind { Null, Boolean, Number, Text, Array, Map };
  using Entry = std::pair<std::string, ValueTree>;

  ValueTree() : kind_(Kind::Null) {}

  static ValueTree null() { return ValueTree(); }
  static ValueTree boolean(bool b) {
    ValueTree t;
    t.kind_ = Kind::Boolean;
    t.bool_ = b;
    return t;
  }
  /// `token` must satisfy the JSON number grammar; it is stored verbatim.
  static ValueTree number(std::string token) {
    if (!valid_number_token(token))
      throw Error("invalid number token: \"" + token + "\"");
    ValueTree t;
    t.kind_ = Kind::Number;
    t.scalar_ = std::move(token);
    return t;
  }
  static ValueTree text(std::string s) {
    ValueTree t;
    t.kind_ = Kind::Text;
    t.scalar_ = std::move(s);
    return t;
  }
  static ValueTree array() {
    ValueTree t;
    t.kind_ = Kind::Array;
    return t;
  }
  static ValueTree array(std::vector<ValueTree> items) {
    ValueTree t;
    t.kind_ = Kind::Array;
    t.items_ = std::move(items);
    return t;
  }
  static ValueTree map() {
    ValueTree t;
    t.kind_ = Kind::Map;
    return t;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_null() const noexcept { return kind_ == Kind::Null; }
  bool is_boolean() const noexcept { return kind_ == Kind::Boolean; }
  bool is_number() const noexcept { return kind_ == Kind::Number; }
  bool is_text() const noexcept { return kind_ == Kind::Text; }
  bool is_array() const noexcept { return kind_ == Kind::Array; }
  bool is_map() const noexcept { return kind_ == Kind::Map; }

  bool as_boolean() const {
    expect(Kind::Boolean, "boolean");
    return bool_;
  }
  /// Exact source text of a number node.
  const std::string& as_number_token() const {
    expect(Kind::Number, "number");
    return scalar_;
  }
  const std::string& as_text() const {
    expect(Kind::Text, "text");
    return scalar_;
  }

  const std::vector<ValueTree>& items() const {
    expect(Kind::Array, "array");
    return items_;
  }
  std::vector<ValueTree>& items() {
    expect(Kind::Array, "array");
    return items_;
  }
  void push_back(ValueTree v) {
    expect(Kind::Array, "array");
    items_.push_back(std::move(v));
  }

  const std::vector<Entry>& entries() const {
    expect(Kind::Map, "map");
    return entries_;
  }
  std::vector<Entry>& entries() {
    expect(Kind::Map, "map");
    return entries_;
  }
  const ValueTree* find(std::string_view key) const {
    expect(Kind::Map, "map");
    for (const auto& [k, v] : entries_)
      if (k == key) return &v;
    return nullptr;
  }
  ValueTree* find(std::string_view key) {
    expect(Kind::Map, "map");
    for (auto& [k, v] : entries_)
      if (k == key) return &v;
    return nullptr;
  }
  bool contains(std::string_view key) const { return find(key) != nullptr; }
  /// Replaces the value under `key`, or appends a new entry.
  void set(std::string key, ValueTree v) {
    if (ValueTree* existing = find(key)) {
      *existing = std::move(v);
      return;
    }
    entries_.emplace_back(std::move(key), std::move(v));
  }
  bool erase(std::string_view key) {
    expect(Kind::Map, "map");
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      if (it->first == key) {
        entries_.erase(it);
        return true;
      }
    }
    return false;
  }

  /// Number of children of an array or map, 0 for scalars.
  std::size_t size() const noexcept {
    if (kind_ == Kind::Array) return items_.size();
    if (kind_ == Kind::Map) return entries_.size();
    return 0;
  }

  /// Structural equality: same kind, same scalar content (number tokens
  /// compared as text), same children in the same order.
  friend bool operator==(const ValueTree& a, const ValueTree& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::Null:
        return true;
      case Kind::Boolean:
        return a.bool_ == b.bool_;
      case Kind::Number:
      case Kind::Text:
        return a.scalar_ == b.scalar_;
      case Kind::Array:
        return a.items_ == b.items_;
      case Kind::Map:
        return a.entries_ == b.entries_;
    }
    return false;
  }
  friend bool operator!=(const ValueTree& a, const ValueTree& b) {
    return !(a == b);
  }

  static bool valid_number_token(std::string_view s) {
    std::size_t i = 0;
    auto digits = [&]() {
      std::size_t start = i;
      while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
      return i > start;
    };
    if (i < s.size() && s[i] == '-') ++i;
    if (i >= s.size()) return false;
    if (s[i] == '0') {
      ++i;
    } else if (s[i] >= '1' && s[i] <= '9') {
      digits();
    } else {
      return false;
    }
    if (i < s.size() && s[i] == '.') {
      ++i;
      if (!digits()) return false;
    }
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
      ++i;
      if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
      if (!digits()) return false;
    }
    return i == s.size();
  }

  /// True for a number whose token is a plain (optionally signed) integer.
  bool is_integer_token() const {
    if (kind_ != Kind::Number) return false;
    std::size_t i = scalar_.size() && scalar_[0] == '-' ? 1 : 0;
    for (; i < scalar_.size(); ++i)
      if (scalar_[i] < '0' || scalar_[i] > '9') return false;
    return true;
  }

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::Null: return "null";
      case Kind::Boolean: return "boolean";
      case Kind::Number: return "number";
      case Kind::Text: return "string";
      case Kind::Array: return "array";
      case Kind::Map: return "object";
    }
    return "?";
  }

 private:
  void expect(Kind k, const char* what) const {
    if (kind_ != k)
      throw Error(std::string("tree node is ") + kind_name(kind_) + ", not " +
                  what);
  }

  Kind kind_;
  bool bool_ = false;
  std::string scalar_;
  std::vector<ValueTree> items_;
  std::vector<Entry> entries_;
};

enum class EmitStyle { Compact, Pretty };

namespace detail {

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  ValueTree run() {
    ValueTree v = parse_value(0);
    skip_ws();
    if (pos_ != text_.size()) fail("trailing content after top-level value");
    return v;
  }

 private:
  static constexpr int kMaxDepth = 500;

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, "line " + std::to_string(line) + ", column " +
                              std::to_string(col));
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
        ++pos_;
      else
        break;
    }
  }

  char peek() {
    if (pos_ >= text_.size()) fail("unexpected end of input");
    return text_[pos_];
  }

  void require(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool consume_literal(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) != lit) return false;
    pos_ += lit.size();
    return true;
  }

  ValueTree parse_value(int depth) {
    if (depth > kMaxDepth) fail("nesting too deep");
    skip_ws();
    char c = peek();
    switch (c) {
      case '{': return parse_map(depth);
      case '[': return parse_array(depth);
      case '"': return ValueTree::text(parse_string());
      case 't':
        if (consume_literal("true")) return ValueTree::boolean(true);
        fail("invalid literal");
      case 'f':
        if (consume_literal("false")) return ValueTree::boolean(false);
        fail("invalid literal");
      case 'n':
        if (consume_literal("null")) return ValueTree::null();
        fail("invalid literal");
      default:
        if (c == '-' || (c >= '0' && c <= '9')) return parse_number();
        fail("unexpected character");
    }
  }

  ValueTree parse_number() {
    std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    if (pos_ >= text_.size()) fail("truncated number");
    if (text_[pos_] == '0') {
      ++pos_;
    } else if (text_[pos_] >= '1' && text_[pos_] <= '9') {
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9')
        ++pos_;
    } else {
      fail("invalid number");
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      if (pos_ >= text_.size() || text_[pos_] < '0' || text_[pos_] > '9')
        fail("invalid number: missing fraction digits");
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9')
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
        ++pos_;
      if (pos_ >= text_.size() || text_[pos_] < '0' || text_[pos_] > '9')
        fail("invalid number: missing exponent digits");
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9')
        ++pos_;
    }
    return ValueTree::number(std::string(text_.substr(start, pos_ - start)));
  }

  unsigned parse_hex4() {
    unsigned v = 0;
    for (int i = 0; i < 4; ++i) {
      if (pos_ >= text_.size()) fail("truncated \\u escape");
      char c = text_[pos_++];
      v <<= 4;
      if (c >= '0' && c <= '9')
        v |= static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f')
        v |= static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F')
        v |= static_cast<unsigned>(c - 'A' + 10);
      else
        fail("invalid \\u escape digit");
    }
    return v;
  }

  static void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }

  std::string parse_string() {
    require('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (static_cast<unsigned char>(c) < 0x20)
        fail("raw control character in string");
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= text_.size()) fail("truncated escape");
      char e = text_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case '/': out.push_back('/'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'u': {
          unsigned cp = parse_hex4();
          if (cp >= 0xd800 && cp <= 0xdbff) {
            if (pos_ + 1 >= text_.size() || text_[pos_] != '\\' ||
                text_[pos_ + 1] != 'u')
              fail("unpaired surrogate");
            pos_ += 2;
            unsigned lo = parse_hex4();
            if (lo < 0xdc00 || lo > 0xdfff) fail("invalid low surrogate");
            cp = 0x10000 + ((cp - 0xd800) << 10) + (lo - 0xdc00);
          } else if (cp >= 0xdc00 && cp <= 0xdfff) {
            fail("unpaired surrogate");
          }
          append_utf8(out, cp);
          break;
        }
        default: fail("invalid escape character");
      }
    }
    return out;
  }

  ValueTree parse_array(int depth) {
    require('[');
    ValueTree arr = ValueTree::array();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return arr;
    }
    while (true) {
      arr.push_back(parse_value(depth + 1));
      skip_ws();
      char c = peek();
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == ']') {
        ++pos_;
        return arr;
      }
      fail("expected ',' or ']'");
    }
  }

  ValueTree parse_map(int depth) {
    require('{');
    ValueTree m = ValueTree::map();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '}') {
      ++pos_;
      return m;
    }
    while (true) {
      skip_ws();
      if (peek() != '"') fail("expected object key");
      std::string key = parse_string();
      if (m.find(key) != nullptr) fail("duplicate object key \"" + key + "\"");
      skip_ws();
      require(':');
      m.entries().emplace_back(std::move(key), parse_value(depth + 1));
      skip_ws();
      char c = peek();
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == '}') {
        ++pos_;
        return m;
      }
      fail("expected ',' or '}'");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void escape_into(std::string& out, std::string_view s) {
  static const char* hex = "0123456789abcdef";
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += "\\u00";
          out.push_back(hex[(static_cast<unsigned char>(c) >> 4) & 0xf]);
          out.push_back(hex[static_cast<unsigned char>(c) & 0xf]);
        } else {
          out.push_back(c);  // UTF-8 bytes pass through unescaped
        }
    }
  }
  out.push_back('"');
}

inline void emit_into(std::string& out, const ValueTree& t, EmitStyle style,
                      int indent) {
  const bool pretty = style == EmitStyle::Pretty;
  auto newline_indent = [&](int level) {
    out.push_back('\n');
    out.append(static_cast<std::size_t>(level) * 2, ' ');
  };
  switch (t.kind()) {
    case ValueTree::Kind::Null: out += "null"; return;
    case ValueTree::Kind::Boolean: out += t.as_boolean() ? "true" : "false"; return;
    case ValueTree::Kind::Number: out += t.as_number_token(); return;
    case ValueTree::Kind::Text: escape_into(out, t.as_text()); return;
    case ValueTree::Kind::Array: {
      const auto& items = t.items();
      if (items.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back(',');
        if (pretty) newline_indent(indent + 1);
        emit_into(out, items[i], style, indent + 1);
      }
      if (pretty) newline_indent(indent);
      out.push_back(']');
      return;
    }
    case ValueTree::Kind::Map: {
      const auto& entries = t.entries();
      if (entries.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) out.push_back(',');
        if (pretty) newline_indent(indent + 1);
        escape_into(out, entries[i].first);
        out.push_back(':');
        if (pretty) out.push_back(' ');
        emit_into(out, entries[i].second, style, indent + 1);
      }
      if (pretty) newline_indent(indent);
      out.push_back('}');
      return;
    }
  }
}

}  // namespace detail

/// Parses UTF-8 JSON text into a ValueTree. Strict JSON: no comments, no
/// trailing commas, duplicate keys rejected.
inline ValueTree parse_tree(std::string_view text) {
  return detail::TreeParser(text).run();
}

/// Deterministic emission. Pretty style indents by two spaces; Compact
/// contains no whitespace. parse_tree(emit_tree(t)) == t for every tree.
inline std::string emit_tree(const ValueTree& t,
                             EmitStyle style = EmitStyle::Pretty) {
  std::string out;
  detail::emit_into(out, t, style, 0);
  return out;
}

}  // namespace mrdikit

#endif  // MRDIKIT_VALUE_TREE_HPP
