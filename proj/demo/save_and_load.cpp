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

// Build a multivariate polynomial over GF(49), write it to poly.mrdi,
// read it back, and check that nothing was lost.

#include <fstream>
#include <iostream>

#include "mrdikit/session.hpp"

using namespace mrdikit;

int main() {
  // the tower: GF(7), then GF(49) = GF(7)[x]/(x^2 + 1), then GF(49)[y, z]
  RingPtr f7 = make_prime_field(7);
  RingPtr r7x = make_poly_ring(f7, "x");
  RingPtr f49 = make_fq_field(
      make_univ_poly(r7x, {{BigInt(0), make_prime_elem(f7, 1)},
                           {BigInt(2), make_prime_elem(f7, 1)}}));
  RingPtr ring = make_mpoly_ring(f49, {"y", "z"});

  auto c = [&](long c0, long c1) {
    return make_fq_elem(f49, {{BigInt(0), make_prime_elem(f7, c0)},
                              {BigInt(1), make_prime_elem(f7, c1)}});
  };
  // 2 y^3 z^4 + (a + 3) z^2 + 5 a y + 1, where a generates GF(49)
  Elem poly = make_mpoly(ring, {{{BigInt(3), BigInt(4)}, c(2, 0)},
                                {{BigInt(0), BigInt(2)}, c(3, 1)},
                                {{BigInt(1), BigInt(0)}, c(0, 5)},
                                {{BigInt(0), BigInt(0)}, c(1, 0)}});

  Session session;
  Document doc = session.save(Value(poly));
  {
    std::ofstream out("poly.mrdi");
    out << emit_document(doc) << '\n';
  }
  std::cout << "wrote poly.mrdi (" << doc.refs.size()
            << " referenced parent rings)\n";

  // reading through the same session hands back the same ring objects
  Value reloaded = session.load(parse_document(emit_document(doc)));
  std::cout << "reloaded polynomial has "
            << mpoly_terms(reloaded.as_elem()).size() << " terms\n";
  std::cout << "equal to the original: "
            << (equals(reloaded.as_elem(), poly) ? "yes" : "no") << '\n';
  return 0;
}
