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
#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "mrdikit/migrate.hpp"
#include "mrdikit/session.hpp"
#include "support/fixtures.hpp"

using namespace mrdikit;

namespace {

// The sample construction as version 0.11.0 wrote it: element type names
// without the "Ring" infix and a lone ring symbol as a bare string.
constexpr const char* kLegacyDocument = R"json({
  "_ns": {
    "Oscar": [
      "https://github.com/oscar-system/Oscar.jl",
      "0.11.0"
    ]
  },
  "_type": {
    "name": "MPolyElem",
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
        "symbols": "x"
      }
    },
    "23f25330-83f7-43a0-ac74-da6f2caa7eb8": {
      "_type": "fqPolyRepField",
      "data": {
        "def_pol": {
          "_type": {
            "params": "f2b7cb6b-535a-4a52-a0cc-75f8e93a6719",
            "name": "PolyElem"
          },
          "data": [["0", "1"], ["1", "1"], ["2", "1"]]
        }
      }
    }
  }
})json";

Document make_step_doc(const std::string& ns, const std::string& version,
                       const std::string& payload) {
  return parse_document(R"({"_ns": {")" + ns + R"(": ["u", ")" + version +
                        R"("]}, "_type": "Step", "data": ")" + payload +
                        R"("})");
}

/// Registry whose transforms append a letter to the data string, so the
/// applied order is visible in the result. The edges do not commute.
UpgradeRegistry lettering_registry() {
  UpgradeRegistry reg;
  auto appender = [](const char* letter) {
    return [letter](ValueTree t) {
      std::string payload = t.find("data")->as_text() + letter;
      t.set("data", ValueTree::text(payload));
      return t;
    };
  };
  reg.add(UpgradeScript{"Test", "1", "2", appender("A")});
  reg.add(UpgradeScript{"Test", "2", "3", appender("B")});
  reg.add(UpgradeScript{"Test", "3", "4", appender("C")});
  return reg;
}

}  // namespace

TEST_CASE("file version reads the namespace entry") {
  Document doc = parse_document(fixtures::kSampleMPolyDocument);
  CHECK(file_version(doc, "Oscar") == "0.13.0-DEV");
  CHECK_THROWS_AS(file_version(doc, "Mathematica"), UpgradeError);

  Document two = parse_document(
      R"({"_ns": {"Oscar": ["u", "1.0"], "Mathematica": ["m", "14"]},
          "_type": "QQField"})");
  CHECK(file_version(two, "Oscar") == "1.0");
  CHECK(file_version(two, "Mathematica") == "14");
}

TEST_CASE("upgrading to the current version changes nothing") {
  UpgradeRegistry reg = lettering_registry();
  Document doc = make_step_doc("Test", "2", "seed");
  Document same = upgrade(doc, "Test", "2", reg);
  CHECK(emit_document(same) == emit_document(doc));
}

TEST_CASE("scripts apply in chain order along a shortest path") {
  UpgradeRegistry reg = lettering_registry();
  Document doc = make_step_doc("Test", "1", "");

  Document out = upgrade(doc, "Test", "4", reg);
  CHECK(out.data->as_text() == "ABC");  // order, not just the set, matters
  CHECK(file_version(out, "Test") == "4");

  SECTION("a registered shortcut wins over the long way round") {
    reg.add(UpgradeScript{"Test", "1", "4", [](ValueTree t) {
                            t.set("data", ValueTree::text("X"));
                            return t;
                          }});
    CHECK(upgrade(doc, "Test", "4", reg).data->as_text() == "X");
  }
}

TEST_CASE("upgrade failures are reported") {
  UpgradeRegistry reg = lettering_registry();
  Document doc = make_step_doc("Test", "1", "");

  CHECK_THROWS_AS(upgrade(doc, "Test", "9", reg), UpgradeError);
  CHECK_THROWS_AS(upgrade(doc, "Other", "4", reg), UpgradeError);

  // a transform that breaks the document is caught after the chain
  reg.add(UpgradeScript{"Test", "4", "5", [](ValueTree t) {
                          t.erase("_type");
                          return t;
                        }});
  try {
    upgrade(doc, "Test", "5", reg);
    FAIL("invalid script output must not pass");
  } catch (const UpgradeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("produced an") != std::string::npos);
  }
}

TEST_CASE("the two-hop legacy upgrade matches the current layout exactly") {
  UpgradeRegistry reg;
  register_legacy_oscar_scripts(reg);

  Document legacy = parse_document(kLegacyDocument);
  CHECK(file_version(legacy, "Oscar") == "0.11.0");

  Document upgraded = upgrade(legacy, "Oscar", "0.13.0-DEV", reg);
  Document current = parse_document(fixtures::kSampleMPolyDocument);
  CHECK(emit_document(upgraded) == emit_document(current));

  // the upgraded document loads like a natively written one
  Session s;
  Value from_upgrade = s.load(upgraded);
  Value from_current = s.load(current);
  CHECK(equals(from_upgrade, from_current));
}

TEST_CASE("foreign namespaces are listed and their payloads preserved") {
  const char* text = R"({
    "_ns": {"Oscar": ["https://github.com/oscar-system/Oscar.jl", "0.13.0-DEV"],
            "Mathematica": ["https://www.wolfram.com/mathematica", "14.0"]},
    "_type": "QQField",
    "mathematica": {"head": "Rational", "args": [1, 2]}
  })";
  Document doc = parse_document(text);

  CHECK(foreign_namespaces(doc, {"Oscar"}) ==
        std::vector<std::string>{"Mathematica"});
  CHECK(foreign_namespaces(doc, {"Oscar", "Mathematica"}).empty());
  CHECK(foreign_namespaces(parse_document(fixtures::kSingletonDocument), {"X"})
            .empty());

  // the unknown payload survives a parse/emit cycle byte for byte
  const std::string once = emit_document(doc, EmitStyle::Compact);
  const std::string twice =
      emit_document(parse_document(once), EmitStyle::Compact);
  CHECK(once == twice);
  CHECK(once.find(R"("head":"Rational")") != std::string::npos);
}

TEST_CASE("tree paths address subtrees") {
  Document doc = parse_document(fixtures::kSampleMPolyDocument);
  ValueTree tree = doc.to_tree();

  CHECK(tree_at_path(tree, "/").is_map());
  CHECK(tree_at_path(tree, "/data/0/0/1").as_text() == "4");
  CHECK(tree_at_path(tree,
                     std::string("/_refs/") + fixtures::kUnivRingUuid +
                         "/data/symbols/0")
            .as_text() == "x");
  CHECK(tree_at_path(tree, "/_type/name").as_text() == "MPolyRingElem");

  CHECK_THROWS_AS(tree_at_path(tree, "/nope"), PathError);
  CHECK_THROWS_AS(tree_at_path(tree, "/data/99"), PathError);
  CHECK_THROWS_AS(tree_at_path(tree, "/data/x"), PathError);
  CHECK_THROWS_AS(tree_at_path(tree, "/data//0"), PathError);
  CHECK_THROWS_AS(tree_at_path(tree, "/_type/name/deeper"), PathError);
}

TEST_CASE("compress and decompress are inverse on the sample document") {
  Document doc = parse_document(fixtures::kSampleMPolyDocument);
  const std::string original = emit_document(doc, EmitStyle::Compact);

  for (const std::string path :
       {std::string("/data"),
        std::string("/_refs/") + fixtures::kQuotientFieldUuid + "/data"}) {
    Document packed = compress_subtree(doc, path);

    ValueTree packed_tree = packed.to_tree();
    const ValueTree& marker = tree_at_path(packed_tree, path);
    CHECK(marker.find("_type")->as_text() == "CompressedTree");
    CHECK(marker.find("codec")->as_text() == "deflate");
    CHECK(packed.ns.contains(kToolNamespace));
    CHECK(validate(packed.to_tree(), builtin_mrdi_schema()).empty());

    Document restored = decompress_subtree(packed, path);
    CHECK(emit_document(restored, EmitStyle::Compact) == original);
    CHECK_FALSE(restored.ns.contains(kToolNamespace));
  }
}

TEST_CASE("compression shortens a large repetitive payload") {
  std::string data = "[";
  for (int i = 0; i < 10000; ++i) {
    if (i) data += ",";
    data += R"([[")" + std::to_string(i % 100) + R"(",")" +
            std::to_string(i / 100) + R"("],")" + std::to_string(i % 7) +
            R"("])";
  }
  data += "]";
  Document doc = parse_document(
      R"({"_ns": {"X": ["u", "1"]}, "_type": "Blob", "data": )" + data + "}");

  Document packed = compress_subtree(doc, "/data");
  CHECK(emit_document(packed, EmitStyle::Compact).size() <
        emit_document(doc, EmitStyle::Compact).size());
  CHECK(emit_document(decompress_subtree(packed, "/data"), EmitStyle::Compact) ==
        emit_document(doc, EmitStyle::Compact));
}

TEST_CASE("compress_tree round-trips arbitrary trees") {
  for (const char* text :
       {R"({"a": [1, 2.5, -3e99], "b": null, "c": true, "d": "café"})",
        R"([])", R"("just text")", R"(123456789012345678901234567890)",
        R"({"nested": {"deep": [[[{"x": "y"}]]]}})"}) {
    ValueTree t = parse_tree(text);
    ValueTree back = decompress_tree(compress_tree(t));
    CHECK(back == t);
    // verbatim number tokens survive the cycle
    CHECK(emit_tree(back, EmitStyle::Compact) ==
          emit_tree(t, EmitStyle::Compact));
  }
}

TEST_CASE("decompress rejects corruption and wrong nodes") {
  Document doc = parse_document(fixtures::kSampleMPolyDocument);
  CHECK_THROWS_AS(decompress_subtree(doc, "/data"), PathError);

  Document packed = compress_subtree(doc, "/data");
  auto tampered_with_payload = [&](const std::string& payload) {
    ValueTree tree = packed.to_tree();
    ValueTree marker = tree_at_path(tree, "/data");
    marker.set("payload", ValueTree::text(payload));
    ValueTree patched = tree;
    patched.set("data", std::move(marker));
    return document_from_tree(patched);
  };
  // not base64
  CHECK_THROWS_AS(decompress_subtree(tampered_with_payload("!!!!"), "/data"),
                  CodecError);
  // base64 of bytes that never came out of deflate
  CHECK_THROWS_AS(decompress_subtree(tampered_with_payload("AAAA"), "/data"),
                  CodecError);

  ValueTree tree = packed.to_tree();
  ValueTree marker = tree_at_path(tree, "/data");
  marker.set("codec", ValueTree::text("gzip"));
  ValueTree patched = tree;
  patched.set("data", std::move(marker));
  CHECK_THROWS_AS(
      decompress_subtree(document_from_tree(patched), "/data"), CodecError);
}

TEST_CASE("compressing a structural key is refused") {
  Document doc = parse_document(fixtures::kSampleMPolyDocument);
  CHECK_THROWS_AS(compress_subtree(doc, "/"), PathError);
  CHECK_THROWS_AS(compress_subtree(doc, "/_type"), PathError);
  CHECK_THROWS_AS(compress_subtree(doc, "/_ns/Oscar"), PathError);
  CHECK_THROWS_AS(compress_subtree(doc, "/missing"), PathError);
}

TEST_CASE("base64 matches the reference vectors") {
  using mrdikit::detail::base64_decode;
  using mrdikit::detail::base64_encode;
  const std::pair<const char*, const char*> vectors[] = {
      {"", ""},           {"f", "Zg=="},     {"fo", "Zm8="},
      {"foo", "Zm9v"},    {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="},
      {"foobar", "Zm9vYmFy"}};
  for (const auto& [plain, coded] : vectors) {
    CHECK(base64_encode(plain) == coded);
    CHECK(base64_decode(coded) == plain);
  }
  CHECK_THROWS_AS(base64_decode("Zg="), CodecError);    // bad length
  CHECK_THROWS_AS(base64_decode("Z!=="), CodecError);   // bad alphabet
  CHECK_THROWS_AS(base64_decode("=AAA"), CodecError);   // pad up front
  CHECK_THROWS_AS(base64_decode("Zg==Zg=="), CodecError);  // pad mid-stream

  std::string bytes;
  for (int i = 0; i < 256; ++i) bytes += static_cast<char>(i);
  CHECK(base64_decode(base64_encode(bytes)) == bytes);
}
