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
#ifndef MRDIKIT_TESTS_FIXTURES_HPP
#define MRDIKIT_TESTS_FIXTURES_HPP

namespace fixtures {

// A bivariate polynomial 2*y^3*z^4 + (a+3)*z^2 + 5*a*y + 1 over GF(49)[y,z],
// where GF(49) = GF(7)[x]/(x^2+x+1) with generator a. The reference table
// carries the whole construction: the multivariate ring, the univariate
// ring GF(7)[x], and the quotient field with its defining polynomial.
inline constexpr const char* kSampleMPolyDocument = R"json({
  "_ns": {
    "Oscar": [
      "https://github.com/oscar-system/Oscar.jl",
      "0.13.0-DEV"
    ]
  },
  "_type": {
    "name": "MPolyRingElem",
    "params": "a7029443-b1d3-4708-a66d-f68eb6616fcf"
  },
  "data": [[["3", "4"], [["0", "2"]]],
           [["0", "2"], [["0", "3"], ["1", "1"]]],
           [["1", "0"], [["1", "5"]]],
           [["0", "0"], [["0", "1"]]]],
  "_refs": {
    "a7029443-b1d3-4708-a66d-f68eb6616fcf": {
      "_type": "MPolyRing",
      "data": {
        "base_ring": "23f25330-83f7-43a0-ac74-da6f2caa7eb8",
        "symbols": ["y", "z"]
      }
    },
    "f2b7cb6b-535a-4a52-a0cc-75f8e93a6719": {
      "_type": "PolyRing",
      "data": {
        "base_ring": {
          "_type": "Nemo.fpField",
          "data": "7"
        },
        "symbols": [
          "x"
        ]
      }
    },
    "23f25330-83f7-43a0-ac74-da6f2caa7eb8": {
      "_type": "fqPolyRepField",
      "data": {
        "def_pol": {
          "_type": {
            "params": "f2b7cb6b-535a-4a52-a0cc-75f8e93a6719",
            "name": "PolyRingElem"
          },
          "data": [["0", "1"], ["1", "1"], ["2", "1"]]
        }
      }
    }
  }
})json";

inline constexpr const char* kMPolyRingUuid = "a7029443-b1d3-4708-a66d-f68eb6616fcf";
inline constexpr const char* kUnivRingUuid = "f2b7cb6b-535a-4a52-a0cc-75f8e93a6719";
inline constexpr const char* kQuotientFieldUuid = "23f25330-83f7-43a0-ac74-da6f2caa7eb8";

// Smallest interesting document: one namespace entry, a bare type, no data.
inline constexpr const char* kSingletonDocument =
    R"json({"_ns":{"X":["u","1"]},"_type":"QQField"})json";

}  // namespace fixtures

#endif  // MRDIKIT_TESTS_FIXTURES_HPP
