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
#ifndef MRDIKIT_VALUE_HPP
#define MRDIKIT_VALUE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mrdikit/algebra.hpp"
#include "mrdikit/value_tree.hpp"

namespace mrdikit {

class Value;

/// Ordered entries over one shared parent ring (or all plain integers).
/// Homogeneity is enforced when the vector is serialized, not on insert.
struct VectorVal {
  std::vector<Value> entries;
};

/// Row-major entries with explicit shape; same sharing rule as VectorVal.
struct MatrixVal {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Value> entries;

  const Value& at(std::size_t r, std::size_t c) const;
};

/// Ordered entries, each free to have its own type and parent.
struct TupleVal {
  std::vector<Value> entries;
};

/// A value of a type the algebra kernel does not model: the raw params
/// and data trees, tagged with the type name. Custom codecs produce and
/// consume these.
struct OpaqueValue {
  std::string type_name;
  std::optional<ValueTree> params;
  std::optional<ValueTree> data;
};

/// Anything the serializer can handle: a plain integer, a ring element,
/// a ring itself, a container, or an opaque custom value.
class Value {
 public:
  Value() = default;
  Value(BigInt v) : v_(std::move(v)) {}
  Value(Elem v) : v_(std::move(v)) {}
  Value(RingPtr v) : v_(std::move(v)) {}
  Value(VectorVal v) : v_(std::move(v)) {}
  Value(MatrixVal v) : v_(std::move(v)) {}
  Value(TupleVal v) : v_(std::move(v)) {}
  Value(OpaqueValue v) : v_(std::move(v)) {}

  bool is_bigint() const { return std::holds_alternative<BigInt>(v_); }
  bool is_elem() const { return std::holds_alternative<Elem>(v_); }
  bool is_ring() const { return std::holds_alternative<RingPtr>(v_); }
  bool is_vector() const { return std::holds_alternative<VectorVal>(v_); }
  bool is_matrix() const { return std::holds_alternative<MatrixVal>(v_); }
  bool is_tuple() const { return std::holds_alternative<TupleVal>(v_); }
  bool is_opaque() const { return std::holds_alternative<OpaqueValue>(v_); }

  const BigInt& as_bigint() const { return get<BigInt>("an integer"); }
  const Elem& as_elem() const { return get<Elem>("a ring element"); }
  const RingPtr& as_ring() const { return get<RingPtr>("a ring"); }
  const VectorVal& as_vector() const { return get<VectorVal>("a vector"); }
  const MatrixVal& as_matrix() const { return get<MatrixVal>("a matrix"); }
  const TupleVal& as_tuple() const { return get<TupleVal>("a tuple"); }
  const OpaqueValue& as_opaque() const {
    return get<OpaqueValue>("an opaque value");
  }

  const char* kind_name() const {
    static const char* names[] = {"integer", "ring element", "ring",
                                  "vector", "matrix", "tuple",
                                  "opaque value"};
    return names[v_.index()];
  }
  std::size_t alternative_index() const { return v_.index(); }

 private:
  template <typename T>
  const T& get(const char* what) const {
    if (!std::holds_alternative<T>(v_))
      throw Error(std::string("value is not ") + what + " (it is a " +
                  kind_name() + ")");
    return std::get<T>(v_);
  }

  std::variant<BigInt, Elem, RingPtr, VectorVal, MatrixVal, TupleVal,
               OpaqueValue>
      v_;
};

inline const Value& MatrixVal::at(std::size_t r, std::size_t c) const {
  if (r >= rows || c >= cols) throw Error("matrix index out of range");
  return entries[r * cols + c];
}

/// Exact equality. Values of different kinds are unequal; ring elements
/// follow the kernel's rule, so comparing elements of identity-distinct
/// rings is an error rather than false.
inline bool equals(const Value& a, const Value& b) {
  if (a.alternative_index() != b.alternative_index()) return false;
  if (a.is_bigint()) return a.as_bigint() == b.as_bigint();
  if (a.is_elem()) return equals(a.as_elem(), b.as_elem());
  if (a.is_ring()) return a.as_ring().get() == b.as_ring().get();
  if (a.is_vector()) {
    const auto& va = a.as_vector().entries;
    const auto& vb = b.as_vector().entries;
    if (va.size() != vb.size()) return false;
    for (std::size_t i = 0; i < va.size(); ++i)
      if (!equals(va[i], vb[i])) return false;
    return true;
  }
  if (a.is_matrix()) {
    const auto& ma = a.as_matrix();
    const auto& mb = b.as_matrix();
    if (ma.rows != mb.rows || ma.cols != mb.cols) return false;
    for (std::size_t i = 0; i < ma.entries.size(); ++i)
      if (!equals(ma.entries[i], mb.entries[i])) return false;
    return true;
  }
  if (a.is_tuple()) {
    const auto& ta = a.as_tuple().entries;
    const auto& tb = b.as_tuple().entries;
    if (ta.size() != tb.size()) return false;
    for (std::size_t i = 0; i < ta.size(); ++i)
      if (!equals(ta[i], tb[i])) return false;
    return true;
  }
  const auto& oa = a.as_opaque();
  const auto& ob = b.as_opaque();
  return oa.type_name == ob.type_name && oa.params == ob.params &&
         oa.data == ob.data;
}

/// Equality across ring copies: parents compare structurally instead of
/// by identity. The cross-session counterpart of equals.
inline bool structurally_equals(const Value& a, const Value& b) {
  if (a.alternative_index() != b.alternative_index()) return false;
  if (a.is_elem()) return structurally_equals(a.as_elem(), b.as_elem());
  if (a.is_ring()) return ring_equals(a.as_ring(), b.as_ring());
  if (a.is_vector()) {
    const auto& va = a.as_vector().entries;
    const auto& vb = b.as_vector().entries;
    if (va.size() != vb.size()) return false;
    for (std::size_t i = 0; i < va.size(); ++i)
      if (!structurally_equals(va[i], vb[i])) return false;
    return true;
  }
  if (a.is_matrix()) {
    const auto& ma = a.as_matrix();
    const auto& mb = b.as_matrix();
    if (ma.rows != mb.rows || ma.cols != mb.cols) return false;
    for (std::size_t i = 0; i < ma.entries.size(); ++i)
      if (!structurally_equals(ma.entries[i], mb.entries[i])) return false;
    return true;
  }
  if (a.is_tuple()) {
    const auto& ta = a.as_tuple().entries;
    const auto& tb = b.as_tuple().entries;
    if (ta.size() != tb.size()) return false;
    for (std::size_t i = 0; i < ta.size(); ++i)
      if (!structurally_equals(ta[i], tb[i])) return false;
    return true;
  }
  return equals(a, b);
}

inline Value add(const Value& a, const Value& b) {
  if (a.is_bigint() && b.is_bigint()) return Value(a.as_bigint() + b.as_bigint());
  if (a.is_elem() && b.is_elem()) return Value(add(a.as_elem(), b.as_elem()));
  if (a.is_vector() && b.is_vector()) {
    const auto& va = a.as_vector().entries;
    const auto& vb = b.as_vector().entries;
    if (va.size() != vb.size())
      throw AlgebraError("vector lengths differ: " +
                         std::to_string(va.size()) + " vs " +
                         std::to_string(vb.size()));
    VectorVal out;
    for (std::size_t i = 0; i < va.size(); ++i)
      out.entries.push_back(add(va[i], vb[i]));
    return Value(std::move(out));
  }
  if (a.is_matrix() && b.is_matrix()) {
    const auto& ma = a.as_matrix();
    const auto& mb = b.as_matrix();
    if (ma.rows != mb.rows || ma.cols != mb.cols)
      throw AlgebraError("matrix shapes differ");
    MatrixVal out;
    out.rows = ma.rows;
    out.cols = ma.cols;
    for (std::size_t i = 0; i < ma.entries.size(); ++i)
      out.entries.push_back(add(ma.entries[i], mb.entries[i]));
    return Value(std::move(out));
  }
  throw AlgebraError(std::string("cannot add a ") + a.kind_name() + " and a " +
                     b.kind_name());
}

inline Value mul(const Value& a, const Value& b) {
  if (a.is_bigint() && b.is_bigint()) return Value(a.as_bigint() * b.as_bigint());
  if (a.is_elem() && b.is_elem()) return Value(mul(a.as_elem(), b.as_elem()));
  throw AlgebraError(std::string("cannot multiply a ") + a.kind_name() +
                     " and a " + b.kind_name());
}

inline Value neg(const Value& a) {
  if (a.is_bigint()) return Value(BigInt(-a.as_bigint()));
  if (a.is_elem()) return Value(neg(a.as_elem()));
  if (a.is_vector()) {
    VectorVal out;
    for (const auto& e : a.as_vector().entries) out.entries.push_back(neg(e));
    return Value(std::move(out));
  }
  if (a.is_matrix()) {
    MatrixVal out;
    out.rows = a.as_matrix().rows;
    out.cols = a.as_matrix().cols;
    for (const auto& e : a.as_matrix().entries) out.entries.push_back(neg(e));
    return Value(std::move(out));
  }
  throw AlgebraError(std::string("cannot negate a ") + a.kind_name());
}

inline bool is_zero(const Value& a) {
  if (a.is_bigint()) return a.as_bigint() == 0;
  if (a.is_elem()) return is_zero(a.as_elem());
  if (a.is_vector()) {
    for (const auto& e : a.as_vector().entries)
      if (!is_zero(e)) return false;
    return true;
  }
  if (a.is_matrix()) {
    for (const auto& e : a.as_matrix().entries)
      if (!is_zero(e)) return false;
    return true;
  }
  throw AlgebraError(std::string("no zero test for a ") + a.kind_name());
}

/// Matrix times column vector over one shared ring (or plain integers).
/// Shape and parent compatibility surface as kernel errors.
inline VectorVal mat_vec_mul(const MatrixVal& m, const VectorVal& v) {
  if (m.cols != v.entries.size())
    throw AlgebraError("matrix has " + std::to_string(m.cols) +
                       " columns but the vector has " +
                       std::to_string(v.entries.size()) + " entries");
  if (m.cols == 0)
    throw AlgebraError("cannot multiply with an empty matrix");
  VectorVal out;
  for (std::size_t r = 0; r < m.rows; ++r) {
    Value acc = mul(m.at(r, 0), v.entries[0]);
    for (std::size_t c = 1; c < m.cols; ++c)
      acc = add(acc, mul(m.at(r, c), v.entries[c]));
    out.entries.push_back(std::move(acc));
  }
  return out;
}

}  // namespace mrdikit

#endif  // MRDIKIT_VALUE_HPP
