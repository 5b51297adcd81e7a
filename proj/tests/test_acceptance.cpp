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

// The seven acceptance gates for the library, one test case per gate.
// Every gate prints exactly one PASS/FAIL line, so a run of this binary
// reads as a checklist.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrdikit/migrate.hpp"
#include "mrdikit/schema.hpp"
#include "mrdikit/session.hpp"
#include "support/fixtures.hpp"

using namespace mrdikit;

namespace {

struct Criterion {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (notes.size() < 8) notes.push_back(what);
  }
};

template <class Body>
void run_criterion(int number, const char* title, Body body) {
  Criterion c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.notes.push_back(std::string("unexpected exception: ") + e.what());
  }
  std::printf("ACCEPTANCE %d (%s): %s\n", number, title,
              c.ok ? "PASS" : "FAIL");
  for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  INFO("criterion " << number << " (" << title << ")");
  for (const auto& n : c.notes) UNSCOPED_INFO(n);
  CHECK(c.ok);
}

/// GF(p^k) built from the first irreducible monic polynomial of degree k,
/// found by counting through the lower coefficients in base p.
RingPtr search_field(long p, long k) {
  RingPtr fp = make_prime_field(p);
  RingPtr rx = make_poly_ring(fp, "x");
  BigInt limit = 1;
  for (long i = 0; i < k; ++i) limit *= p;
  for (BigInt n = 0; n < limit; ++n) {
    std::vector<std::pair<BigInt, Elem>> terms{{BigInt(k), one(fp)}};
    BigInt rest = n;
    for (long d = 0; d < k; ++d) {
      BigInt digit = rest % p;
      rest /= p;
      if (digit != 0) terms.emplace_back(BigInt(d), make_prime_elem(fp, digit));
    }
    try {
      return make_fq_field(make_univ_poly(rx, std::move(terms)));
    } catch (const AlgebraError&) {
      // reducible; keep counting
    }
  }
  throw AlgebraError("no irreducible polynomial of degree " +
                     std::to_string(k) + " over GF(" + std::to_string(p) + ")");
}

const RingPtr& prime_base(const RingPtr& fq) {
  return as_fq_field(*fq).prime_field();
}

/// The published construction, including the quotient by the recorded
/// (reducible) polynomial, built programmatically.
struct SampleSetup {
  RingPtr f7 = make_prime_field(7);
  RingPtr r7x = make_poly_ring(f7, "x");
  RingPtr f49q;
  RingPtr mring;

  SampleSetup() {
    Elem def_pol = make_univ_poly(r7x, {{BigInt(0), make_prime_elem(f7, 1)},
                                        {BigInt(1), make_prime_elem(f7, 1)},
                                        {BigInt(2), make_prime_elem(f7, 1)}});
    f49q = make_fq_field(def_pol, CheckPolicy::Permissive);
    mring = make_mpoly_ring(f49q, {"y", "z"});
  }

  Elem c(long c0, long c1) const {
    return make_fq_elem(f49q, {{BigInt(0), make_prime_elem(f7, c0)},
                               {BigInt(1), make_prime_elem(f7, c1)}});
  }

  Elem sample_poly() const {
    return make_mpoly(mring, {{{BigInt(3), BigInt(4)}, c(2, 0)},
                              {{BigInt(0), BigInt(2)}, c(3, 1)},
                              {{BigInt(1), BigInt(0)}, c(0, 5)},
                              {{BigInt(0), BigInt(0)}, c(1, 0)}});
  }
};

/// Deterministic generator of serializable values across all the value
/// kinds the round-trip gate names.
struct ValueMaker {
  std::mt19937_64 rng{20240817};
  std::vector<RingPtr> quads;   // GF(p^2) for p in {3, 5, 7, 11}
  std::vector<RingPtr> mrings;  // bivariate rings over each quad
  std::vector<RingPtr> urings;  // univariate rings over each prime base
  RingPtr f13 = make_prime_field(13);

  ValueMaker() {
    for (long p : {3L, 5L, 7L, 11L}) {
      quads.push_back(search_field(p, 2));
      mrings.push_back(make_mpoly_ring(quads.back(), {"y", "z"}));
      urings.push_back(make_poly_ring(prime_base(quads.back()), "t"));
    }
  }

  long uni(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(rng);
  }

  Elem rand_fq(const RingPtr& f) {
    const RingPtr& base = prime_base(f);
    long p = as_prime_field(*base).modulus().convert_to<long>();
    return make_fq_elem(f, {{BigInt(0), make_prime_elem(base, uni(0, p - 1))},
                            {BigInt(1), make_prime_elem(base, uni(0, p - 1))}});
  }

  Elem rand_mpoly(const RingPtr& ring) {
    const RingPtr& f = as_mpoly_ring(*ring).base();
    std::vector<std::pair<std::vector<BigInt>, Elem>> terms;
    std::vector<std::pair<long, long>> used;
    long want = uni(0, 6);
    while (static_cast<long>(terms.size()) < want) {
      long a = uni(0, 9), b = uni(0, 9);
      bool fresh = true;
      for (auto& [x, y] : used) fresh = fresh && !(x == a && y == b);
      if (!fresh) continue;
      used.emplace_back(a, b);
      terms.push_back({{BigInt(a), BigInt(b)}, rand_fq(f)});
    }
    return make_mpoly(ring, std::move(terms));
  }

  Elem rand_upoly(const RingPtr& ring) {
    const RingPtr& base = as_univ_poly_ring(*ring).base();
    long p = as_prime_field(*base).modulus().convert_to<long>();
    std::vector<std::pair<BigInt, Elem>> terms;
    std::vector<long> used;
    long want = uni(0, 5);
    while (static_cast<long>(terms.size()) < want) {
      long d = uni(0, 12);
      bool fresh = true;
      for (long u : used) fresh = fresh && u != d;
      if (!fresh) continue;
      used.push_back(d);
      terms.emplace_back(BigInt(d), make_prime_elem(base, uni(0, p - 1)));
    }
    return make_univ_poly(ring, std::move(terms));
  }

  Value next(std::size_t i) {
    std::size_t pick = i % quads.size();
    switch (i % 5) {
      case 0:
        return Value(rand_mpoly(mrings[pick]));
      case 1:
        return Value(rand_upoly(urings[pick]));
      case 2: {
        VectorVal v;
        long n = uni(1, 6);
        for (long j = 0; j < n; ++j)
          v.entries.emplace_back(rand_fq(quads[pick]));
        return Value(std::move(v));
      }
      case 3: {
        TupleVal t;
        long n = uni(0, 4);
        for (long j = 0; j < n; ++j) {
          switch (uni(0, 2)) {
            case 0:
              t.entries.emplace_back(BigInt(uni(-1000000, 1000000)));
              break;
            case 1:
              t.entries.emplace_back(rand_fq(quads[pick]));
              break;
            default:
              t.entries.emplace_back(make_prime_elem(f13, uni(0, 12)));
          }
        }
        return Value(std::move(t));
      }
      default: {
        MatrixVal m;
        m.rows = m.cols = 3;
        for (int j = 0; j < 9; ++j)
          m.entries.emplace_back(rand_fq(quads[pick]));
        return Value(std::move(m));
      }
    }
  }
};

ValueTree without_key(const ValueTree& map, std::string_view key) {
  ValueTree out = ValueTree::map();
  for (const auto& [k, v] : map.entries())
    if (k != key) out.set(k, v);
  return out;
}

/// First parent ring found among a value's leaf elements, if any.
const Ring* first_parent(const Value& v) {
  if (v.is_elem()) return v.as_elem().parent.get();
  const std::vector<Value>* entries = nullptr;
  if (v.is_vector()) entries = &v.as_vector().entries;
  if (v.is_matrix()) entries = &v.as_matrix().entries;
  if (v.is_tuple()) entries = &v.as_tuple().entries;
  if (entries)
    for (const auto& e : *entries)
      if (const Ring* r = first_parent(e)) return r;
  return nullptr;
}

// operation tables over small fields, for fast exhaustive axiom scans

struct FieldTables {
  std::vector<Elem> elems;
  int n = 0;
  std::vector<int> add, mul;  // n*n, row-major
  int zero_at = -1, one_at = -1;

  int at_add(int i, int j) const { return add[i * n + j]; }
  int at_mul(int i, int j) const { return mul[i * n + j]; }
};

std::string elem_key(const Elem& e) {
  return emit_tree(encode_elem_data(e), EmitStyle::Compact);
}

FieldTables tabulate(const RingPtr& field) {
  FieldTables t;
  t.elems = enumerate_field(field);
  t.n = static_cast<int>(t.elems.size());
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < t.n; ++i) index.emplace(elem_key(t.elems[i]), i);
  Elem z = zero(field), o = one(field);
  t.zero_at = index.at(elem_key(z));
  t.one_at = index.at(elem_key(o));
  t.add.resize(t.n * t.n);
  t.mul.resize(t.n * t.n);
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) {
      t.add[i * t.n + j] = index.at(elem_key(add(t.elems[i], t.elems[j])));
      t.mul[i * t.n + j] = index.at(elem_key(mul(t.elems[i], t.elems[j])));
    }
  return t;
}

/// Every field axiom, checked on all pairs and triples via the tables.
void check_axioms(Criterion& c, const FieldTables& t, const std::string& name) {
  const int n = t.n;
  bool commutative = true, identities = true, inverses = true;
  for (int i = 0; i < n && commutative; ++i)
    for (int j = 0; j < n && commutative; ++j)
      commutative = t.at_add(i, j) == t.at_add(j, i) &&
                    t.at_mul(i, j) == t.at_mul(j, i);
  c.require(commutative, name + ": commutativity fails");

  for (int i = 0; i < n && identities; ++i)
    identities = t.at_add(i, t.zero_at) == i && t.at_mul(i, t.one_at) == i &&
                 t.at_mul(i, t.zero_at) == t.zero_at;
  c.require(identities, name + ": identity laws fail");

  for (int i = 0; i < n && inverses; ++i) {
    bool add_inv = false, mul_inv = i == t.zero_at;
    for (int j = 0; j < n; ++j) {
      add_inv = add_inv || t.at_add(i, j) == t.zero_at;
      mul_inv = mul_inv || t.at_mul(i, j) == t.one_at;
    }
    inverses = add_inv && mul_inv;
  }
  c.require(inverses, name + ": an inverse is missing");

  bool associative = true, distributive = true;
  for (int i = 0; i < n && (associative && distributive); ++i)
    for (int j = 0; j < n && (associative && distributive); ++j)
      for (int k = 0; k < n; ++k) {
        associative =
            associative &&
            t.at_add(t.at_add(i, j), k) == t.at_add(i, t.at_add(j, k)) &&
            t.at_mul(t.at_mul(i, j), k) == t.at_mul(i, t.at_mul(j, k));
        distributive = distributive &&
                       t.at_mul(i, t.at_add(j, k)) ==
                           t.at_add(t.at_mul(i, j), t.at_mul(i, k));
        if (!(associative && distributive)) break;
      }
  c.require(associative, name + ": associativity fails");
  c.require(distributive, name + ": distributivity fails");
}

// random trees for the foreign-payload and compression gates

ValueTree random_tree(std::mt19937_64& rng, int depth) {
  auto uni = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  int kind = depth <= 0 ? uni(0, 3) : uni(0, 5);
  switch (kind) {
    case 0:
      return ValueTree::null();
    case 1:
      return parse_tree(uni(0, 1) ? "true" : "false");
    case 2: {
      // number tokens must survive verbatim, so exercise odd shapes
      const char* tokens[] = {"0", "-17", "3.25", "1e999",
                              "-2.5e-5", "123456789123456789123456789"};
      return parse_tree(tokens[uni(0, 5)]);
    }
    case 3: {
      std::string s = "k";
      for (int i = uni(0, 8); i > 0; --i) s += static_cast<char>('a' + uni(0, 25));
      return ValueTree::text(s);
    }
    case 4: {
      ValueTree arr = ValueTree::array();
      for (int i = uni(0, 4); i > 0; --i)
        arr.push_back(random_tree(rng, depth - 1));
      return arr;
    }
    default: {
      ValueTree map = ValueTree::map();
      for (int i = uni(0, 4); i > 0; --i) {
        std::string key = "k" + std::to_string(uni(0, 1000)) + "_" +
                          std::to_string(i);
        if (!map.contains(key)) map.set(key, random_tree(rng, depth - 1));
      }
      return map;
    }
  }
}

}  // namespace

TEST_CASE("acceptance 1: sample-document fidelity") {
  run_criterion(1, "sample-document fidelity", [](Criterion& c) {
    Session s;
    Value loaded = s.load(parse_document(fixtures::kSampleMPolyDocument));
    SampleSetup setup;

    c.require(loaded.is_elem(), "top value is not a ring element");
    const Elem& poly = loaded.as_elem();
    c.require(structurally_equals(poly, setup.sample_poly()),
              "loaded polynomial differs from the programmatic construction");
    c.require(mpoly_terms(poly).size() == 4, "term count is not 4");

    const RingPtr& field = as_mpoly_ring(*poly.parent).base();
    std::vector<Elem> all = enumerate_field(field);
    c.require(all.size() == 49, "coefficient field does not have 49 elements");
    bool distinct = true;
    for (std::size_t i = 0; i < all.size() && distinct; ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j)
        if (equals(all[i], all[j])) {
          distinct = false;
          break;
        }
    c.require(distinct, "enumerated elements are not pairwise distinct");

    Elem a = fq_gen(field);
    Elem relation = add(add(mul(a, a), a), one(field));
    c.require(is_zero(relation), "generator does not satisfy a^2 + a + 1 = 0");
  });
}

TEST_CASE("acceptance 2: randomized round-trips") {
  run_criterion(2, "randomized round-trips", [](Criterion& c) {
    ValueMaker maker;
    Session s(424242);
    int failures = 0;
    for (std::size_t i = 0; i < 500; ++i) {
      Value v = maker.next(i);
      try {
        Value back = s.load(s.save(v));
        // equals() demands identical parent objects for elements, so a
        // passing comparison certifies parent identity reuse as well
        bool same = equals(back, v);
        const Ring* before = first_parent(v);
        const Ring* after = first_parent(back);
        if (!(same && before == after)) ++failures;
      } catch (const Error&) {
        ++failures;
      }
    }
    c.require(failures == 0,
              std::to_string(failures) + " of 500 round-trips failed");
  });
}

TEST_CASE("acceptance 3: schema conformance and mutation rejection") {
  run_criterion(3, "schema conformance and mutation rejection", [](Criterion& c) {
    const Schema& schema = builtin_mrdi_schema();
    ValueMaker maker;
    Session s(99);
    SampleSetup setup;

    std::vector<ValueTree> pool;
    pool.push_back(s.save(Value(setup.sample_poly())).to_tree());
    pool.push_back(s.save(Value(rational_field())).to_tree());
    int nonconforming = 0;
    for (std::size_t i = 0; i < 120; ++i) {
      Document doc = s.save(maker.next(i));
      ValueTree tree = doc.to_tree();
      if (!validate(tree, schema).empty()) ++nonconforming;
      pool.push_back(std::move(tree));
    }
    c.require(nonconforming == 0,
              std::to_string(nonconforming) + " saved documents fail the schema");

    std::mt19937_64 rng(777);
    int accepted = 0;
    for (int i = 0; i < 500; ++i) {
      const ValueTree& base =
          pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      ValueTree mutant = base;
      switch (i % 3) {
        case 0:  // drop _type
          mutant = without_key(base, "_type");
          break;
        case 1: {  // malform a UUID key (fall back to the root if no refs)
          ValueTree* refs = mutant.find("_refs");
          if (refs && refs->is_map() && refs->size() > 0) {
            ValueTree rebuilt = ValueTree::map();
            for (std::size_t k = 0; k < refs->size(); ++k) {
              const auto& [key, entry] = refs->entries()[k];
              rebuilt.set(k == 0 ? "not-a-uuid-" + std::to_string(i) : key,
                          entry);
            }
            mutant.set("_refs", std::move(rebuilt));
          } else {
            ValueTree bad = ValueTree::map();
            bad.set("zzz", ValueTree::map());
            mutant.set("_refs", std::move(bad));
          }
          break;
        }
        default: {  // wrong params JSON type
          ValueTree td = ValueTree::map();
          td.set("name", ValueTree::text("MPolyRingElem"));
          td.set("params", parse_tree("3.5"));
          mutant.set("_type", std::move(td));
        }
      }
      if (validate(mutant, schema).empty()) ++accepted;
    }
    c.require(accepted == 0,
              std::to_string(accepted) + " of 500 mutants were falsely accepted");
  });
}

TEST_CASE("acceptance 4: vector and tuple parameter semantics") {
  run_criterion(4, "vector and tuple parameter semantics", [](Criterion& c) {
    Session s(4);
    RingPtr a = make_prime_field(7);
    RingPtr b = make_prime_field(7);  // same structure, different object

    VectorVal mixed;
    mixed.entries.emplace_back(make_prime_elem(a, 3));
    mixed.entries.emplace_back(make_prime_elem(b, 4));
    bool refused = false;
    std::string message;
    try {
      s.save(Value(mixed));
    } catch (const CodecError& e) {
      refused = true;
      message = e.what();
    }
    c.require(refused, "mixed-parent vector was saved");
    c.require(message.find("Tuple") != std::string::npos,
              "refusal does not point at Tuple");

    Document tuple_doc =
        s.save_tuple({Value(make_prime_elem(a, 3)), Value(make_prime_elem(b, 4))});
    c.require(tuple_doc.type_desc.params.has_value() &&
                  tuple_doc.type_desc.params->is_array() &&
                  tuple_doc.type_desc.params->size() == 2,
              "tuple params is not an array of exactly 2 descriptors");

    VectorVal shared;
    shared.entries.emplace_back(make_prime_elem(a, 3));
    shared.entries.emplace_back(make_prime_elem(a, 4));
    Document vec_doc = s.save(Value(shared));
    bool one_descriptor = vec_doc.type_desc.params.has_value() &&
                          !vec_doc.type_desc.params->is_array();
    if (one_descriptor)
      TypeDescriptor::from_tree(*vec_doc.type_desc.params, "/_type/params");
    c.require(one_descriptor,
              "shared-ring vector params is not exactly one descriptor");
  });
}

TEST_CASE("acceptance 5: cross-file continuation") {
  run_criterion(5, "cross-file continuation", [](Criterion& c) {
    // GF(49) as the quotient by x^2 + 1, so multiplication has the closed
    // form (c0 + c1 a)(d0 + d1 a) = (c0 d0 - c1 d1) + (c0 d1 + c1 d0) a,
    // which serves as an independent oracle below.
    RingPtr f7 = make_prime_field(7);
    RingPtr r7x = make_poly_ring(f7, "x");
    RingPtr f49 = make_fq_field(
        make_univ_poly(r7x, {{BigInt(0), make_prime_elem(f7, 1)},
                             {BigInt(2), make_prime_elem(f7, 1)}}));
    auto mk = [&](long c0, long c1) {
      return make_fq_elem(f49, {{BigInt(0), make_prime_elem(f7, c0)},
                                {BigInt(1), make_prime_elem(f7, c1)}});
    };
    auto coeffs = [](const Elem& e) {
      long c0 = 0, c1 = 0;
      for (const auto& t : univ_terms(e)) {
        long v = prime_value(t.coeff).convert_to<long>();
        if (t.deg == 0) c0 = v;
        if (t.deg == 1) c1 = v;
      }
      return std::pair<long, long>(c0, c1);
    };
    auto oracle_mul = [](std::pair<long, long> x, std::pair<long, long> y) {
      long r0 = ((x.first * y.first - x.second * y.second) % 7 + 7) % 7;
      long r1 = (x.first * y.second + x.second * y.first) % 7;
      return std::pair<long, long>(r0, r1);
    };

    // the kernel's multiplication agrees with the oracle on all 49 x 49
    std::vector<Elem> all = enumerate_field(f49);
    c.require(all.size() == 49, "enumeration is not 49 elements");
    bool table_ok = true;
    for (const Elem& x : all)
      for (const Elem& y : all)
        table_ok = table_ok && coeffs(mul(x, y)) == oracle_mul(coeffs(x), coeffs(y));
    c.require(table_ok, "kernel disagrees with the multiplication table");

    // Alice writes two files through one session
    Session alice(555);
    MatrixVal m;
    m.rows = m.cols = 3;
    for (long i = 0; i < 9; ++i) m.entries.emplace_back(mk(i % 7, (3 * i + 1) % 7));
    VectorVal v;
    for (long i = 0; i < 3; ++i) v.entries.emplace_back(mk((2 * i + 5) % 7, i));
    const std::string matrix_file = emit_document(alice.save(Value(m)));
    const std::string vector_file = emit_document(alice.save(Value(v)));

    // Bob continues in a fresh session
    Session bob;
    Value bm = bob.load(parse_document(matrix_file));
    Value bv = bob.load(parse_document(vector_file));
    c.require(first_parent(bm) == first_parent(bv),
              "ring was not unified by its UUID across the two files");
    VectorVal product = mat_vec_mul(bm.as_matrix(), bv.as_vector());

    bool product_ok = product.entries.size() == 3;
    for (std::size_t r = 0; r < 3 && product_ok; ++r) {
      std::pair<long, long> want{0, 0};
      for (std::size_t col = 0; col < 3; ++col) {
        auto term = oracle_mul(coeffs(m.at(r, col).as_elem()),
                               coeffs(v.entries[col].as_elem()));
        want.first = (want.first + term.first) % 7;
        want.second = (want.second + term.second) % 7;
      }
      product_ok = coeffs(product.entries[r].as_elem()) == want;
    }
    c.require(product_ok, "product disagrees with the oracle");

    // independent sessions do not share UUIDs, so continuation must fail
    Session stranger(777);
    const std::string foreign_vector = emit_document(stranger.save(Value(v)));
    Session bob2;
    Value fm = bob2.load(parse_document(matrix_file));
    Value fv = bob2.load(parse_document(foreign_vector));
    bool refused = false;
    try {
      mat_vec_mul(fm.as_matrix(), fv.as_vector());
    } catch (const AlgebraError&) {
      refused = true;
    }
    c.require(refused, "distinct-UUID inputs were multiplied anyway");
  });
}

TEST_CASE("acceptance 6: field axioms") {
  run_criterion(6, "field axioms", [](Criterion& c) {
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L})
      check_axioms(c, tabulate(make_prime_field(p)), "GF(" + std::to_string(p) + ")");

    for (auto [p, k] : std::vector<std::pair<long, long>>{{2, 2},
                                                          {2, 3},
                                                          {2, 4},
                                                          {2, 5},
                                                          {2, 6},
                                                          {2, 7},
                                                          {2, 8},
                                                          {3, 2},
                                                          {3, 3},
                                                          {3, 4},
                                                          {3, 5},
                                                          {5, 2},
                                                          {5, 3},
                                                          {7, 2},
                                                          {7, 3},
                                                          {11, 2},
                                                          {13, 2}}) {
      std::string name =
          "GF(" + std::to_string(p) + "^" + std::to_string(k) + ")";
      check_axioms(c, tabulate(search_field(p, k)), name);
    }

    // the multiplicative group of GF(49) has exactly 48 members
    FieldTables t = tabulate(search_field(7, 2));
    int invertible = 0;
    bool all_order_divides = true;
    for (int i = 0; i < t.n; ++i) {
      bool inv = false;
      for (int j = 0; j < t.n; ++j) inv = inv || t.at_mul(i, j) == t.one_at;
      if (!inv) continue;
      ++invertible;
      int power = i;
      for (int e = 1; e < 48; ++e) power = t.at_mul(power, i);
      all_order_divides = all_order_divides && power == t.one_at;
    }
    c.require(invertible == 48,
              "GF(49) has " + std::to_string(invertible) + " units, not 48");
    c.require(all_order_divides, "some unit's order does not divide 48");
  });
}

TEST_CASE("acceptance 7: upgrade, foreign namespaces, compression") {
  run_criterion(7, "upgrade, foreign namespaces, compression", [](Criterion& c) {
    // two-hop upgrade of a legacy layout loads like a native save
    std::string legacy = fixtures::kSampleMPolyDocument;
    auto swap = [&](const std::string& from, const std::string& to) {
      for (std::size_t at = legacy.find(from); at != std::string::npos;
           at = legacy.find(from, at + to.size()))
        legacy.replace(at, from.size(), to);
    };
    swap("0.13.0-DEV", "0.11.0");
    swap("MPolyRingElem", "MPolyElem");
    swap("\"PolyRingElem\"", "\"PolyElem\"");

    UpgradeRegistry registry;
    register_legacy_oscar_scripts(registry);
    Document upgraded =
        upgrade(parse_document(legacy), "Oscar", "0.13.0-DEV", registry);

    SampleSetup setup;
    Session writer(31415);
    Document native = writer.save(Value(setup.sample_poly()));
    Session reader;
    Value from_upgrade = reader.load(upgraded);
    Value from_native = reader.load(parse_document(emit_document(native)));
    c.require(structurally_equals(from_upgrade, from_native),
              "upgraded document does not load equal to a native save");

    // foreign namespaces and payloads survive parse/emit cycles untouched
    std::mt19937_64 rng(2718);
    int cycle_failures = 0;
    for (int i = 0; i < 100; ++i) {
      ValueTree root = ValueTree::map();
      ValueTree ns = ValueTree::map();
      ValueTree oscar = ValueTree::array();
      oscar.push_back(ValueTree::text("https://github.com/oscar-system/Oscar.jl"));
      oscar.push_back(ValueTree::text("0.13.0-DEV"));
      ns.set("Oscar", std::move(oscar));
      ValueTree alien = ValueTree::array();
      alien.push_back(ValueTree::text("https://example.org/alien"));
      alien.push_back(ValueTree::text(std::to_string(i)));
      ns.set("Alien" + std::to_string(i % 7), std::move(alien));
      root.set("_ns", std::move(ns));
      root.set("_type", ValueTree::text("QQField"));
      root.set("alien_payload", random_tree(rng, 3));

      Document doc = document_from_tree(root);
      std::string once = emit_document(doc, EmitStyle::Compact);
      std::string twice =
          emit_document(parse_document(once), EmitStyle::Compact);
      if (once != twice) ++cycle_failures;
      if (foreign_namespaces(doc, {"Oscar"}).size() != 1) ++cycle_failures;
    }
    c.require(cycle_failures == 0,
              std::to_string(cycle_failures) + " foreign-payload cycles failed");

    // compression inverts exactly on random subtrees
    int pack_failures = 0;
    for (int i = 0; i < 100; ++i) {
      ValueTree t = random_tree(rng, 4);
      ValueTree back = decompress_tree(compress_tree(t));
      if (!(back == t) || emit_tree(back, EmitStyle::Compact) !=
                              emit_tree(t, EmitStyle::Compact))
        ++pack_failures;
    }
    c.require(pack_failures == 0,
              std::to_string(pack_failures) + " compression inverses failed");
  });
}
