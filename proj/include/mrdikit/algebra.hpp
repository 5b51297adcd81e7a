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
#ifndef MRDIKIT_ALGEBRA_HPP
#define MRDIKIT_ALGEBRA_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mrdikit/errors.hpp"

namespace mrdikit {

using BigInt = boost::multiprecision::cpp_int;

/// Exact decimal conversion; the inverse of BigInt's .str().
inline BigInt bigint_from_decimal(std::string_view s) {
  if (s.empty()) throw AlgebraError("empty integer literal");
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) throw AlgebraError("bare sign is not an integer");
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9')
      throw AlgebraError("invalid integer literal \"" + std::string(s) + "\"");
  if (s.size() > 1 + (s[0] == '-' ? 1u : 0u) && s[s[0] == '-' ? 1 : 0] == '0' &&
      s != "0")
    throw AlgebraError("integer literal with leading zero \"" +
                       std::string(s) + "\"");
  return BigInt(std::string(s));
}

inline std::string bigint_to_decimal(const BigInt& v) { return v.str(); }

/// Reduced fraction with positive denominator.
struct Rational {
  BigInt num;
  BigInt den;

  Rational() : num(0), den(1) {}
  Rational(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) {
    if (den == 0) throw AlgebraError("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num * b.num, a.den * b.den);
  }
  friend Rational operator-(const Rational& a) {
    Rational r;
    r.num = -a.num;
    r.den = a.den;
    return r;
  }
};

enum class RingKind { Rationals, Prime, UnivPoly, Fq, MPoly };

inline const char* ring_kind_name(RingKind k) {
  switch (k) {
    case RingKind::Rationals: return "rational field";
    case RingKind::Prime: return "prime field";
    case RingKind::UnivPoly: return "univariate polynomial ring";
    case RingKind::Fq: return "finite field extension";
    case RingKind::MPoly: return "multivariate polynomial ring";
  }
  return "ring";
}

/// Construction policy for desk-scale invariant checks. Strict rejects a
/// composite modulus or reducible defining polynomial outright; Permissive
/// constructs the quotient anyway, recording the verdict on the ring, so
/// that published data with an imperfect construction still loads.
enum class CheckPolicy { Strict, Permissive };

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

/// Base of the ring hierarchy. Rings are immutable after construction and
/// shared by pointer; object identity (the pointer) distinguishes
/// isomorphic copies, which may play different roles in a computation.
class Ring {
 public:
  explicit Ring(RingKind kind) : kind_(kind) {}
  virtual ~Ring() = default;
  Ring(const Ring&) = delete;
  Ring& operator=(const Ring&) = delete;

  RingKind kind() const noexcept { return kind_; }

 private:
  RingKind kind_;
};

struct UnivTerm;
struct MTerm;

/// One element of some ring. The payload layout is fixed by the parent's
/// kind: a residue for prime fields, a reduced fraction for the rationals,
/// an ascending sparse term list for univariate polynomials and extension
/// field representatives, a decreasing degree-lexicographic term list for
/// multivariate polynomials. Payloads are always kept canonical.
struct Elem {
  RingPtr parent;
  std::variant<std::monostate, BigInt, Rational, std::vector<UnivTerm>,
               std::vector<MTerm>>
      payload;

  // identity on the parent, structure on the payload
  friend bool operator==(const Elem&, const Elem&) = default;
};

struct UnivTerm {
  BigInt deg;
  Elem coeff;
  friend bool operator==(const UnivTerm&, const UnivTerm&) = default;
};

struct MTerm {
  std::vector<BigInt> exps;
  Elem coeff;
  friend bool operator==(const MTerm&, const MTerm&) = default;
};

class RationalField final : public Ring {
 public:
  RationalField() : Ring(RingKind::Rationals) {}
};

/// The conceptual singleton instance. All canonical construction paths
/// hand out this object, so identity comparison just works.
inline const RingPtr& rational_field() {
  static const RingPtr instance = std::make_shared<RationalField>();
  return instance;
}

class PrimeField final : public Ring {
 public:
  PrimeField(BigInt p, bool checked)
      : Ring(RingKind::Prime), p_(std::move(p)), checked_(checked) {}

  const BigInt& modulus() const noexcept { return p_; }
  /// True when primality was verified; moduli of 2^31 and above are
  /// accepted unchecked.
  bool primality_checked() const noexcept { return checked_; }

 private:
  BigInt p_;
  bool checked_;
};

class UnivPolyRing final : public Ring {
 public:
  UnivPolyRing(RingPtr base, std::string symbol)
      : Ring(RingKind::UnivPoly),
        base_(std::move(base)),
        symbol_(std::move(symbol)) {}

  const RingPtr& base() const noexcept { return base_; }
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  RingPtr base_;
  std::string symbol_;
};

class FqField final : public Ring {
 public:
  FqField(Elem def_pol, bool checked, bool irreducible)
      : Ring(RingKind::Fq),
        def_pol_(std::move(def_pol)),
        checked_(checked),
        irreducible_(irreducible) {}

  /// The monic defining polynomial, an element of a univariate polynomial
  /// ring over a prime field.
  const Elem& def_pol() const noexcept { return def_pol_; }
  const RingPtr& poly_ring() const noexcept { return def_pol_.parent; }
  const RingPtr& prime_field() const;
  std::size_t degree() const;
  /// True when irreducibility was decided (constructions of order beyond
  /// desk scale are accepted undecided).
  bool irreducibility_checked() const noexcept { return checked_; }
  /// Meaningful only when irreducibility_checked(). A permissively built
  /// quotient by a reducible polynomial reports false: its residues still
  /// form a ring, but not a field.
  bool irreducible() const noexcept { return irreducible_; }

 private:
  Elem def_pol_;
  bool checked_;
  bool irreducible_;
};

class MPolyRing final : public Ring {
 public:
  MPolyRing(RingPtr base, std::vector<std::string> symbols)
      : Ring(RingKind::MPoly),
        base_(std::move(base)),
        symbols_(std::move(symbols)) {}

  const RingPtr& base() const noexcept { return base_; }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

 private:
  RingPtr base_;
  std::vector<std::string> symbols_;
};

namespace detail {

template <typename T>
const T& ring_as(const Ring& r, RingKind expect) {
  if (r.kind() != expect)
    throw AlgebraError(std::string("expected a ") + ring_kind_name(expect) +
                       ", found a " + ring_kind_name(r.kind()));
  return static_cast<const T&>(r);
}

}  // namespace detail

inline const PrimeField& as_prime_field(const Ring& r) {
  return detail::ring_as<PrimeField>(r, RingKind::Prime);
}
inline const UnivPolyRing& as_univ_poly_ring(const Ring& r) {
  return detail::ring_as<UnivPolyRing>(r, RingKind::UnivPoly);
}
inline const FqField& as_fq_field(const Ring& r) {
  return detail::ring_as<FqField>(r, RingKind::Fq);
}
inline const MPolyRing& as_mpoly_ring(const Ring& r) {
  return detail::ring_as<MPolyRing>(r, RingKind::MPoly);
}

inline const RingPtr& FqField::prime_field() const {
  return as_univ_poly_ring(*def_pol_.parent).base();
}

namespace detail {

inline BigInt mod_reduce(BigInt v, const BigInt& p) {
  v %= p;
  if (v < 0) v += p;
  return v;
}

/// Deterministic trial division; callers guarantee p < 2^31.
inline bool is_prime_u64(std::uint64_t p) {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  for (std::uint64_t d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

inline constexpr std::uint64_t kPrimalityBound = std::uint64_t(1) << 31;
inline constexpr std::uint64_t kEnumerationBound = 1000000;

/// p^deg when it stays within the enumeration bound, nullopt otherwise.
inline std::optional<std::uint64_t> small_order(const BigInt& p,
                                                std::size_t deg) {
  if (p > kEnumerationBound) return std::nullopt;
  std::uint64_t base = p.convert_to<std::uint64_t>();
  std::uint64_t order = 1;
  for (std::size_t i = 0; i < deg; ++i) {
    if (order > kEnumerationBound / base) return std::nullopt;
    order *= base;
  }
  if (order > kEnumerationBound) return std::nullopt;
  return order;
}

}  // namespace detail

/// Fresh prime field. Primality is decided by trial division for p below
/// 2^31; larger moduli are accepted with primality_checked() == false. A
/// composite modulus at checkable scale is always an error: residues mod a
/// composite are not a field under either policy.
inline RingPtr make_prime_field(BigInt p,
                                CheckPolicy policy = CheckPolicy::Strict) {
  (void)policy;
  if (p < 2) throw AlgebraError("prime field modulus must be at least 2");
  bool checked = false;
  if (p < detail::kPrimalityBound) {
    if (!detail::is_prime_u64(p.convert_to<std::uint64_t>()))
      throw AlgebraError("modulus " + p.str() + " is not prime");
    checked = true;
  }
  return std::make_shared<PrimeField>(std::move(p), checked);
}

/// Fresh univariate polynomial ring over any base ring.
inline RingPtr make_poly_ring(RingPtr base, std::string symbol) {
  if (!base) throw AlgebraError("polynomial ring needs a base ring");
  if (symbol.empty())
    throw AlgebraError("polynomial ring symbol must be nonempty");
  return std::make_shared<UnivPolyRing>(std::move(base), std::move(symbol));
}

/// Fresh multivariate polynomial ring; symbols must be distinct.
inline RingPtr make_mpoly_ring(RingPtr base, std::vector<std::string> symbols) {
  if (!base) throw AlgebraError("polynomial ring needs a base ring");
  if (symbols.empty())
    throw AlgebraError("multivariate ring needs at least one symbol");
  std::set<std::string_view> seen;
  for (const auto& s : symbols) {
    if (s.empty()) throw AlgebraError("polynomial ring symbol must be nonempty");
    if (!seen.insert(s).second)
      throw AlgebraError("duplicate symbol \"" + s + "\"");
  }
  return std::make_shared<MPolyRing>(std::move(base), std::move(symbols));
}

// element payload accessors

inline const BigInt& prime_value(const Elem& e) {
  return std::get<BigInt>(e.payload);
}
inline const Rational& rational_value(const Elem& e) {
  return std::get<Rational>(e.payload);
}
inline const std::vector<UnivTerm>& univ_terms(const Elem& e) {
  return std::get<std::vector<UnivTerm>>(e.payload);
}
inline const std::vector<MTerm>& mpoly_terms(const Elem& e) {
  return std::get<std::vector<MTerm>>(e.payload);
}

inline Elem make_prime_elem(const RingPtr& field, BigInt value) {
  const PrimeField& f = as_prime_field(*field);
  return Elem{field, detail::mod_reduce(std::move(value), f.modulus())};
}

inline Elem make_rational_elem(Rational value) {
  return Elem{rational_field(), std::move(value)};
}

namespace detail {

inline bool is_zero_impl(const Elem& e);

inline void check_coeff_parent(const Elem& coeff, const RingPtr& base) {
  if (coeff.parent.get() != base.get())
    throw AlgebraError(
        "coefficient parent is not the base ring of this polynomial ring "
        "(object identity is required; no coercion is performed)");
}

/// Canonicalizes a sparse univariate term list: ascending degree, no zero
/// coefficients, duplicate degrees rejected.
inline std::vector<UnivTerm> canonical_univ_terms(
    std::vector<std::pair<BigInt, Elem>> terms, const RingPtr& base) {
  std::vector<UnivTerm> out;
  for (auto& [deg, coeff] : terms) {
    if (deg < 0) throw AlgebraError("negative exponent");
    check_coeff_parent(coeff, base);
    if (!is_zero_impl(coeff)) out.push_back({std::move(deg), std::move(coeff)});
  }
  std::sort(out.begin(), out.end(),
            [](const UnivTerm& a, const UnivTerm& b) { return a.deg < b.deg; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i - 1].deg == out[i].deg)
      throw AlgebraError("duplicate exponent " + out[i].deg.str());
  return out;
}

/// Degree-lexicographic comparison: higher total degree first, ties by
/// leftmost differing exponent.
inline bool deglex_greater(const std::vector<BigInt>& a,
                           const std::vector<BigInt>& b) {
  BigInt da = 0, db = 0;
  for (const auto& x : a) da += x;
  for (const auto& x : b) db += x;
  if (da != db) return da > db;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

inline std::vector<MTerm> canonical_mpoly_terms(
    std::vector<std::pair<std::vector<BigInt>, Elem>> terms,
    const RingPtr& base, std::size_t arity) {
  std::vector<MTerm> out;
  for (auto& [exps, coeff] : terms) {
    if (exps.size() != arity)
      throw AlgebraError("exponent vector of length " +
                         std::to_string(exps.size()) + " in a ring with " +
                         std::to_string(arity) + " symbols");
    for (const auto& e : exps)
      if (e < 0) throw AlgebraError("negative exponent");
    check_coeff_parent(coeff, base);
    if (!is_zero_impl(coeff)) out.push_back({std::move(exps), std::move(coeff)});
  }
  std::sort(out.begin(), out.end(), [](const MTerm& a, const MTerm& b) {
    return deglex_greater(a.exps, b.exps);
  });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i - 1].exps == out[i].exps)
      throw AlgebraError("duplicate exponent vector");
  return out;
}

}  // namespace detail

/// Univariate polynomial from (degree, coefficient) terms in any order.
inline Elem make_univ_poly(const RingPtr& ring,
                           std::vector<std::pair<BigInt, Elem>> terms) {
  const UnivPolyRing& r = as_univ_poly_ring(*ring);
  return Elem{ring, detail::canonical_univ_terms(std::move(terms), r.base())};
}

Elem add(const Elem& a, const Elem& b);
Elem mul(const Elem& a, const Elem& b);
Elem neg(const Elem& a);
bool equals(const Elem& a, const Elem& b);
bool is_zero(const Elem& a);

namespace detail {

/// Dense coefficient vector of residues for arithmetic over a prime
/// field; index = degree.
inline std::vector<BigInt> dense_from_univ(const std::vector<UnivTerm>& terms,
                                           std::size_t size_hint) {
  std::vector<BigInt> dense(size_hint, BigInt(0));
  for (const auto& t : terms) {
    std::size_t d = t.deg.convert_to<std::size_t>();
    if (d >= dense.size()) dense.resize(d + 1, BigInt(0));
    dense[d] = prime_value(t.coeff);
  }
  return dense;
}

inline std::vector<UnivTerm> univ_from_dense(const std::vector<BigInt>& dense,
                                             const RingPtr& base) {
  std::vector<UnivTerm> out;
  for (std::size_t d = 0; d < dense.size(); ++d)
    if (dense[d] != 0) out.push_back({BigInt(d), Elem{base, dense[d]}});
  return out;
}

/// In-place remainder of dense mod the monic dense divisor, coefficients
/// reduced mod p.
inline void dense_mod(std::vector<BigInt>& dense,
                      const std::vector<BigInt>& divisor, const BigInt& p) {
  const std::size_t dd = divisor.size() - 1;  // divisor degree, monic
  while (dense.size() > dd) {
    BigInt lead = mod_reduce(dense.back(), p);
    std::size_t shift = dense.size() - 1 - dd;
    if (lead != 0)
      for (std::size_t i = 0; i < dd; ++i)
        dense[shift + i] = mod_reduce(dense[shift + i] - lead * divisor[i], p);
    dense.pop_back();
  }
  for (auto& c : dense) c = mod_reduce(std::move(c), p);
}

/// Brute-force irreducibility over GF(p) by trial division with every
/// monic polynomial of degree at most deg/2. Callers guarantee p^deg is
/// desk scale.
inline bool dense_irreducible(const std::vector<BigInt>& poly,
                              const BigInt& p) {
  const std::size_t deg = poly.size() - 1;
  if (deg == 1) return true;
  const std::uint64_t pv = p.convert_to<std::uint64_t>();
  for (std::size_t k = 1; 2 * k <= deg; ++k) {
    // enumerate monic divisors x^k + c_{k-1}x^{k-1} + ... + c_0 by
    // counting the coefficient tuple in base p
    std::vector<std::uint64_t> c(k, 0);
    while (true) {
      std::vector<BigInt> divisor(k + 1);
      for (std::size_t i = 0; i < k; ++i) divisor[i] = c[i];
      divisor[k] = 1;
      std::vector<BigInt> rem = poly;
      dense_mod(rem, divisor, p);
      bool zero = true;
      for (const auto& x : rem)
        if (x != 0) {
          zero = false;
          break;
        }
      if (zero) return false;
      std::size_t i = 0;
      for (; i < k; ++i) {
        if (++c[i] < pv) break;
        c[i] = 0;
      }
      if (i == k) break;
    }
  }
  return true;
}

}  // namespace detail

/// Fresh extension field (quotient by a monic defining polynomial over a
/// prime field). Irreducibility is brute-forced when the construction's
/// order p^deg is at most 10^6; Strict rejects a reducible polynomial,
/// Permissive records the verdict and constructs the quotient ring anyway.
/// Larger constructions are accepted undecided under both policies.
inline RingPtr make_fq_field(Elem def_pol,
                             CheckPolicy policy = CheckPolicy::Strict) {
  const UnivPolyRing& pr = as_univ_poly_ring(*def_pol.parent);
  const PrimeField& fp = as_prime_field(*pr.base());
  const auto& terms = univ_terms(def_pol);
  if (terms.empty() || terms.back().deg < 1)
    throw AlgebraError("defining polynomial must have degree at least 1");
  if (prime_value(terms.back().coeff) != 1)
    throw AlgebraError("defining polynomial must be monic");
  const std::size_t deg = terms.back().deg.convert_to<std::size_t>();
  bool checked = false;
  bool irreducible = false;
  if (fp.primality_checked() && detail::small_order(fp.modulus(), deg)) {
    std::vector<BigInt> dense = detail::dense_from_univ(terms, deg + 1);
    irreducible = detail::dense_irreducible(dense, fp.modulus());
    checked = true;
    if (!irreducible && policy == CheckPolicy::Strict)
      throw AlgebraError(
          "defining polynomial is reducible over GF(" + fp.modulus().str() +
          "); the quotient is not a field");
  }
  return std::make_shared<FqField>(std::move(def_pol), checked, irreducible);
}

inline std::size_t FqField::degree() const {
  return univ_terms(def_pol_).back().deg.convert_to<std::size_t>();
}

/// Extension field element from (power, prime-field coefficient) terms;
/// powers of the generator beyond the degree are reduced mod def_pol.
inline Elem make_fq_elem(const RingPtr& field,
                         std::vector<std::pair<BigInt, Elem>> terms) {
  const FqField& f = as_fq_field(*field);
  const RingPtr& base = f.prime_field();
  std::vector<UnivTerm> canon =
      detail::canonical_univ_terms(std::move(terms), base);
  const std::size_t deg = f.degree();
  if (!canon.empty() && canon.back().deg >= deg) {
    const BigInt& p = as_prime_field(*base).modulus();
    std::vector<BigInt> dense = detail::dense_from_univ(
        canon, canon.back().deg.convert_to<std::size_t>() + 1);
    std::vector<BigInt> divisor =
        detail::dense_from_univ(univ_terms(f.def_pol()), deg + 1);
    detail::dense_mod(dense, divisor, p);
    canon = detail::univ_from_dense(dense, base);
  }
  return Elem{field, std::move(canon)};
}

/// Multivariate polynomial from (exponent vector, coefficient) terms in
/// any order; duplicates are an error, never merged silently.
inline Elem make_mpoly(const RingPtr& ring,
                       std::vector<std::pair<std::vector<BigInt>, Elem>> terms) {
  const MPolyRing& r = as_mpoly_ring(*ring);
  return Elem{ring, detail::canonical_mpoly_terms(std::move(terms), r.base(),
                                                  r.symbols().size())};
}

inline Elem zero(const RingPtr& ring) {
  switch (ring->kind()) {
    case RingKind::Rationals: return Elem{ring, Rational()};
    case RingKind::Prime: return Elem{ring, BigInt(0)};
    case RingKind::UnivPoly:
    case RingKind::Fq: return Elem{ring, std::vector<UnivTerm>{}};
    case RingKind::MPoly: return Elem{ring, std::vector<MTerm>{}};
  }
  throw AlgebraError("unknown ring kind");
}

inline Elem one(const RingPtr& ring) {
  switch (ring->kind()) {
    case RingKind::Rationals:
      return Elem{ring, Rational(1, 1)};
    case RingKind::Prime:
      return make_prime_elem(ring, 1);
    case RingKind::UnivPoly: {
      const auto& base = as_univ_poly_ring(*ring).base();
      return make_univ_poly(ring, {{BigInt(0), one(base)}});
    }
    case RingKind::Fq: {
      const auto& base = as_fq_field(*ring).prime_field();
      return make_fq_elem(ring, {{BigInt(0), one(base)}});
    }
    case RingKind::MPoly: {
      const MPolyRing& r = as_mpoly_ring(*ring);
      std::vector<BigInt> exps(r.symbols().size(), BigInt(0));
      return make_mpoly(ring, {{std::move(exps), one(r.base())}});
    }
  }
  throw AlgebraError("unknown ring kind");
}

/// The residue class of the polynomial variable: the canonical generator
/// of an extension field of degree at least 2.
inline Elem fq_gen(const RingPtr& field) {
  const FqField& f = as_fq_field(*field);
  return make_fq_elem(field, {{BigInt(1), one(f.prime_field())}});
}

namespace detail {

inline void check_same_parent(const Elem& a, const Elem& b) {
  if (a.parent.get() != b.parent.get())
    throw AlgebraError(
        "operands live in different rings (object identity differs; "
        "isomorphic copies are deliberately distinct and no coercion is "
        "performed)");
}

inline bool is_zero_impl(const Elem& e) {
  if (!e.parent) throw AlgebraError("element without a parent ring");
  switch (e.parent->kind()) {
    case RingKind::Rationals: return rational_value(e).num == 0;
    case RingKind::Prime: return prime_value(e) == 0;
    case RingKind::UnivPoly:
    case RingKind::Fq: return univ_terms(e).empty();
    case RingKind::MPoly: return mpoly_terms(e).empty();
  }
  throw AlgebraError("unknown ring kind");
}

/// Merges two canonical ascending term lists with a recursive coefficient
/// combiner; zero sums vanish.
inline std::vector<UnivTerm> merge_univ(const std::vector<UnivTerm>& a,
                                        const std::vector<UnivTerm>& b) {
  std::vector<UnivTerm> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].deg < b[j].deg)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].deg < a[i].deg) {
      out.push_back(b[j++]);
    } else {
      Elem sum = add(a[i].coeff, b[j].coeff);
      if (!is_zero_impl(sum)) out.push_back({a[i].deg, std::move(sum)});
      ++i;
      ++j;
    }
  }
  return out;
}

inline std::vector<MTerm> merge_mpoly(const std::vector<MTerm>& a,
                                      const std::vector<MTerm>& b) {
  std::vector<MTerm> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size()) {
      out.push_back(a[i++]);
    } else if (i == a.size()) {
      out.push_back(b[j++]);
    } else if (a[i].exps == b[j].exps) {
      Elem sum = add(a[i].coeff, b[j].coeff);
      if (!is_zero_impl(sum)) out.push_back({a[i].exps, std::move(sum)});
      ++i;
      ++j;
    } else if (deglex_greater(a[i].exps, b[j].exps)) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  return out;
}

}  // namespace detail

inline bool is_zero(const Elem& a) { return detail::is_zero_impl(a); }

inline Elem neg(const Elem& a) {
  switch (a.parent->kind()) {
    case RingKind::Rationals:
      return Elem{a.parent, -rational_value(a)};
    case RingKind::Prime: {
      const BigInt& p = as_prime_field(*a.parent).modulus();
      return Elem{a.parent, detail::mod_reduce(-prime_value(a), p)};
    }
    case RingKind::UnivPoly:
    case RingKind::Fq: {
      std::vector<UnivTerm> out = univ_terms(a);
      for (auto& t : out) t.coeff = neg(t.coeff);
      return Elem{a.parent, std::move(out)};
    }
    case RingKind::MPoly: {
      std::vector<MTerm> out = mpoly_terms(a);
      for (auto& t : out) t.coeff = neg(t.coeff);
      return Elem{a.parent, std::move(out)};
    }
  }
  throw AlgebraError("unknown ring kind");
}

inline Elem add(const Elem& a, const Elem& b) {
  detail::check_same_parent(a, b);
  switch (a.parent->kind()) {
    case RingKind::Rationals:
      return Elem{a.parent, rational_value(a) + rational_value(b)};
    case RingKind::Prime: {
      const BigInt& p = as_prime_field(*a.parent).modulus();
      return Elem{a.parent,
                  detail::mod_reduce(prime_value(a) + prime_value(b), p)};
    }
    case RingKind::UnivPoly:
    case RingKind::Fq:
      return Elem{a.parent, detail::merge_univ(univ_terms(a), univ_terms(b))};
    case RingKind::MPoly:
      return Elem{a.parent,
                  detail::merge_mpoly(mpoly_terms(a), mpoly_terms(b))};
  }
  throw AlgebraError("unknown ring kind");
}

inline Elem mul(const Elem& a, const Elem& b) {
  detail::check_same_parent(a, b);
  switch (a.parent->kind()) {
    case RingKind::Rationals:
      return Elem{a.parent, rational_value(a) * rational_value(b)};
    case RingKind::Prime: {
      const BigInt& p = as_prime_field(*a.parent).modulus();
      return Elem{a.parent,
                  detail::mod_reduce(prime_value(a) * prime_value(b), p)};
    }
    case RingKind::UnivPoly: {
      // sparse convolution, accumulated by degree
      std::map<BigInt, Elem> acc;
      for (const auto& ta : univ_terms(a)) {
        for (const auto& tb : univ_terms(b)) {
          BigInt d = ta.deg + tb.deg;
          Elem prod = mul(ta.coeff, tb.coeff);
          auto it = acc.find(d);
          if (it == acc.end())
            acc.emplace(std::move(d), std::move(prod));
          else
            it->second = add(it->second, prod);
        }
      }
      std::vector<UnivTerm> out;
      for (auto& [deg, coeff] : acc)
        if (!detail::is_zero_impl(coeff))
          out.push_back({deg, std::move(coeff)});
      return Elem{a.parent, std::move(out)};
    }
    case RingKind::Fq: {
      const FqField& f = as_fq_field(*a.parent);
      const RingPtr& base = f.prime_field();
      const BigInt& p = as_prime_field(*base).modulus();
      const std::size_t deg = f.degree();
      std::vector<BigInt> da = detail::dense_from_univ(univ_terms(a), deg);
      std::vector<BigInt> db = detail::dense_from_univ(univ_terms(b), deg);
      std::vector<BigInt> prod(da.size() + db.size(), BigInt(0));
      for (std::size_t i = 0; i < da.size(); ++i) {
        if (da[i] == 0) continue;
        for (std::size_t j = 0; j < db.size(); ++j)
          if (db[j] != 0)
            prod[i + j] = detail::mod_reduce(prod[i + j] + da[i] * db[j], p);
      }
      std::vector<BigInt> divisor =
          detail::dense_from_univ(univ_terms(f.def_pol()), deg + 1);
      detail::dense_mod(prod, divisor, p);
      return Elem{a.parent, detail::univ_from_dense(prod, base)};
    }
    case RingKind::MPoly: {
      auto cmp = [](const std::vector<BigInt>& x, const std::vector<BigInt>& y) {
        return detail::deglex_greater(x, y);
      };
      std::map<std::vector<BigInt>, Elem, decltype(cmp)> acc(cmp);
      for (const auto& ta : mpoly_terms(a)) {
        for (const auto& tb : mpoly_terms(b)) {
          std::vector<BigInt> exps(ta.exps.size());
          for (std::size_t i = 0; i < exps.size(); ++i)
            exps[i] = ta.exps[i] + tb.exps[i];
          Elem prod = mul(ta.coeff, tb.coeff);
          auto it = acc.find(exps);
          if (it == acc.end())
            acc.emplace(std::move(exps), std::move(prod));
          else
            it->second = add(it->second, prod);
        }
      }
      std::vector<MTerm> out;
      for (auto& [exps, coeff] : acc)
        if (!detail::is_zero_impl(coeff)) out.push_back({exps, std::move(coeff)});
      return Elem{a.parent, std::move(out)};
    }
  }
  throw AlgebraError("unknown ring kind");
}

namespace detail {

inline bool payload_equal(const Elem& a, const Elem& b) {
  return a.payload == b.payload;
}

}  // namespace detail

/// Mathematical equality within one ring. Canonical payloads make this a
/// structural comparison; operands in different rings are an error, not
/// "unequal", because the question is not well posed without a coercion.
inline bool equals(const Elem& a, const Elem& b) {
  detail::check_same_parent(a, b);
  return detail::payload_equal(a, b);
}

/// Structural ring comparison, indifferent to object identity. Two calls
/// of a factory with equal arguments produce rings that are ring_equals
/// but not identical.
inline bool ring_equals(const RingPtr& a, const RingPtr& b);

/// Structural element comparison across ring copies: parents must be
/// ring_equals and payloads equal. Used to compare values loaded in
/// different sessions.
inline bool structurally_equals(const Elem& a, const Elem& b);

namespace detail {

inline bool payload_structural(const Elem& a, const Elem& b) {
  if (a.payload.index() != b.payload.index()) return false;
  if (std::holds_alternative<std::vector<UnivTerm>>(a.payload)) {
    const auto& ta = univ_terms(a);
    const auto& tb = univ_terms(b);
    if (ta.size() != tb.size()) return false;
    for (std::size_t i = 0; i < ta.size(); ++i)
      if (ta[i].deg != tb[i].deg ||
          !structurally_equals(ta[i].coeff, tb[i].coeff))
        return false;
    return true;
  }
  if (std::holds_alternative<std::vector<MTerm>>(a.payload)) {
    const auto& ta = mpoly_terms(a);
    const auto& tb = mpoly_terms(b);
    if (ta.size() != tb.size()) return false;
    for (std::size_t i = 0; i < ta.size(); ++i)
      if (ta[i].exps != tb[i].exps ||
          !structurally_equals(ta[i].coeff, tb[i].coeff))
        return false;
    return true;
  }
  return a.payload == b.payload;
}

}  // namespace detail

inline bool ring_equals(const RingPtr& a, const RingPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case RingKind::Rationals:
      return true;
    case RingKind::Prime:
      return as_prime_field(*a).modulus() == as_prime_field(*b).modulus();
    case RingKind::UnivPoly: {
      const auto& ra = as_univ_poly_ring(*a);
      const auto& rb = as_univ_poly_ring(*b);
      return ra.symbol() == rb.symbol() && ring_equals(ra.base(), rb.base());
    }
    case RingKind::Fq: {
      const auto& fa = as_fq_field(*a);
      const auto& fb = as_fq_field(*b);
      return structurally_equals(fa.def_pol(), fb.def_pol());
    }
    case RingKind::MPoly: {
      const auto& ra = as_mpoly_ring(*a);
      const auto& rb = as_mpoly_ring(*b);
      return ra.symbols() == rb.symbols() && ring_equals(ra.base(), rb.base());
    }
  }
  return false;
}

inline bool structurally_equals(const Elem& a, const Elem& b) {
  if (!ring_equals(a.parent, b.parent)) return false;
  return detail::payload_structural(a, b);
}

/// All elements of a finite field (or of a permissively constructed
/// quotient: its residue classes), each exactly once, in counting order.
/// Orders beyond 10^6 are an error.
inline std::vector<Elem> enumerate_field(const RingPtr& ring) {
  if (ring->kind() == RingKind::Prime) {
    const PrimeField& f = as_prime_field(*ring);
    auto order = detail::small_order(f.modulus(), 1);
    if (!order) throw AlgebraError("field too large to enumerate");
    std::vector<Elem> out;
    out.reserve(*order);
    for (std::uint64_t v = 0; v < *order; ++v)
      out.push_back(Elem{ring, BigInt(v)});
    return out;
  }
  if (ring->kind() == RingKind::Fq) {
    const FqField& f = as_fq_field(*ring);
    const RingPtr& base = f.prime_field();
    const BigInt& p = as_prime_field(*base).modulus();
    const std::size_t deg = f.degree();
    auto order = detail::small_order(p, deg);
    if (!order) throw AlgebraError("field too large to enumerate");
    const std::uint64_t pv = p.convert_to<std::uint64_t>();
    std::vector<Elem> out;
    out.reserve(*order);
    std::vector<std::uint64_t> c(deg, 0);
    for (std::uint64_t n = 0; n < *order; ++n) {
      std::vector<UnivTerm> terms;
      for (std::size_t i = 0; i < deg; ++i)
        if (c[i] != 0) terms.push_back({BigInt(i), Elem{base, BigInt(c[i])}});
      out.push_back(Elem{ring, std::move(terms)});
      for (std::size_t i = 0; i < deg; ++i) {
        if (++c[i] < pv) break;
        c[i] = 0;
      }
    }
    return out;
  }
  throw AlgebraError("enumeration needs a finite field");
}

}  // namespace mrdikit

#endif  // MRDIKIT_ALGEBRA_HPP
