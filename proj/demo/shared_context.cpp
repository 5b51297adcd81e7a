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

// One sitting writes a matrix and a vector over the same field into two
// files; a later sitting loads both and multiplies them. Because both
// files carry the same ring UUIDs, the loader unifies the parents and
// the product is well defined.

#include <fstream>
#include <iostream>

#include "mrdikit/session.hpp"

using namespace mrdikit;

static std::string slurp(const char* path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int main() {
  RingPtr f7 = make_prime_field(7);
  RingPtr r7x = make_poly_ring(f7, "x");
  RingPtr f49 = make_fq_field(
      make_univ_poly(r7x, {{BigInt(0), make_prime_elem(f7, 1)},
                           {BigInt(2), make_prime_elem(f7, 1)}}));
  auto c = [&](long c0, long c1) {
    return make_fq_elem(f49, {{BigInt(0), make_prime_elem(f7, c0)},
                              {BigInt(1), make_prime_elem(f7, c1)}});
  };

  // first sitting: one session, two files, shared references
  {
    Session writer;
    MatrixVal m;
    m.rows = m.cols = 3;
    for (long i = 0; i < 9; ++i) m.entries.emplace_back(c(i % 7, (2 * i) % 7));
    VectorVal v;
    for (long i = 0; i < 3; ++i) v.entries.emplace_back(c(i + 1, i));
    std::ofstream("matrix.mrdi") << emit_document(writer.save(Value(m))) << '\n';
    std::ofstream("vector.mrdi") << emit_document(writer.save(Value(v))) << '\n';
    std::cout << "wrote matrix.mrdi and vector.mrdi\n";
  }

  // later sitting: a fresh session knows nothing except the two files
  Session reader;
  Value m = reader.load(parse_document(slurp("matrix.mrdi")));
  Value v = reader.load(parse_document(slurp("vector.mrdi")));
  VectorVal product = mat_vec_mul(m.as_matrix(), v.as_vector());

  Document out = reader.save(Value(product));
  std::ofstream("product.mrdi") << emit_document(out) << '\n';
  std::cout << "wrote product.mrdi; its field reference matches the inputs: "
            << (out.refs.size() == 2 ? "yes" : "no") << '\n';
  return 0;
}
