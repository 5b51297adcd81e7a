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
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrdikit/migrate.hpp"
#include "mrdikit/schema.hpp"
#include "mrdikit/session.hpp"

namespace {

using namespace mrdikit;

// Exit contract: 0 success, 1 semantic failure, 2 I/O or usage error.
constexpr int kOk = 0;
constexpr int kSemantic = 1;
constexpr int kUsage = 2;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + out_path);
  out << text << "\n";
  if (!out) throw IoFailure("cannot write " + out_path);
}

EmitStyle style_of(bool compact) {
  return compact ? EmitStyle::Compact : EmitStyle::Pretty;
}

int run_validate(const std::vector<std::string>& paths,
                 const std::string& schema_path) {
  Schema schema;
  if (schema_path.empty()) {
    schema = builtin_mrdi_schema();
  } else {
    schema = compile_schema(parse_tree(read_file(schema_path)));
    for (const auto& w : schema.warnings) std::cerr << "warning: " << w << "\n";
  }

  bool all_conform = true;
  const bool prefix = paths.size() > 1;
  for (const auto& path : paths) {
    std::vector<Violation> violations;
    try {
      violations = validate(parse_tree(read_file(path)), schema);
    } catch (const ParseError& e) {
      std::cout << (prefix ? path + ": " : "") << "/: parse: " << e.what()
                << "\n";
      all_conform = false;
      continue;
    }
    for (const auto& v : violations)
      std::cout << (prefix ? path + ": " : "") << v.path << ": " << v.rule
                << ": " << v.message << "\n";
    all_conform = all_conform && violations.empty();
  }
  return all_conform ? kOk : kSemantic;
}

std::string skeleton(const ValueTree& t) {
  if (t.is_map()) return "object{" + std::to_string(t.size()) + "}";
  if (t.is_array()) return "array[" + std::to_string(t.size()) + "]";
  if (t.is_text()) {
    std::string s = t.as_text();
    if (s.size() > 40) s = s.substr(0, 37) + "...";
    return "\"" + s + "\"";
  }
  if (t.is_number()) return t.as_number_token();
  if (t.is_boolean()) return t.as_boolean() ? "true" : "false";
  return "null";
}

std::string describe_params(const TypeDescriptor& td) {
  if (!td.params) return "";
  if (td.params->is_text()) {
    const std::string& s = td.params->as_text();
    return " (params " + (is_uuid(s) ? s.substr(0, 8) : s) + ")";
  }
  return " (params " + skeleton(*td.params) + ")";
}

int run_show(const std::string& path) {
  Document doc = parse_document(read_file(path));
  std::ostringstream out;

  for (const auto& [name, entry] : doc.ns)
    out << name << " = " << entry.url << " (" << entry.version << ")\n";
  out << doc.type_desc.name << describe_params(doc.type_desc) << "\n";
  if (doc.data) out << "data " << skeleton(*doc.data) << "\n";
  if (doc.meta) {
    out << "meta";
    if (doc.meta->name) out << " name=\"" << *doc.meta->name << "\"";
    if (doc.meta->author_orcid) out << " orcid=" << *doc.meta->author_orcid;
    out << "\n";
  }
  if (doc.refs.size() > 0) {
    out << "refs in dependency order:\n";
    for (const std::string& uuid : ref_dependency_order(doc)) {
      const RefEntry& entry = *doc.refs.find(uuid);
      out << "  " << uuid.substr(0, 8) << " " << entry.type_desc.name;
      std::string arrows;
      for (const std::string& m : ref_entry_mentions(entry))
        if (m != uuid && doc.refs.contains(m))
          arrows += (arrows.empty() ? "" : ", ") + m.substr(0, 8);
      if (!arrows.empty()) out << " -> " << arrows;
      out << "\n";
    }
  }
  std::cout << out.str();
  return kOk;
}

int run_roundtrip(const std::string& path) {
  Document original = parse_document(read_file(path));
  Session first;
  Value once = first.load(original);

  Session fresh;
  Document saved = fresh.save(once);
  Value twice = fresh.load(parse_document(emit_document(saved)));

  if (!equals(once, twice)) {
    std::cerr << "roundtrip mismatch for " << path << "\n";
    return kSemantic;
  }
  std::cout << "roundtrip OK: " << path << "\n";
  return kOk;
}

const Ring* parent_of_entries(const std::vector<Value>& entries) {
  for (const auto& e : entries)
    if (e.is_elem()) return e.as_elem().parent.get();
  return nullptr;
}

int run_mulmv(const std::string& matrix_path, const std::string& vector_path,
              const std::string& out_path, bool compact) {
  Session session;
  Value mval = session.load(parse_document(read_file(matrix_path)));
  Value vval = session.load(parse_document(read_file(vector_path)));
  if (!mval.is_matrix())
    throw Error(matrix_path + " does not hold a matrix");
  if (!vval.is_vector())
    throw Error(vector_path + " does not hold a vector");

  const Ring* mring = parent_of_entries(mval.as_matrix().entries);
  const Ring* vring = parent_of_entries(vval.as_vector().entries);
  if (mring && vring && mring != vring)
    throw Error(
        "the matrix and the vector name their rings by different UUIDs, so "
        "the rings are not recognized as the same object; produce both files "
        "in one session so they share references");

  VectorVal product = mat_vec_mul(mval.as_matrix(), vval.as_vector());
  Document doc = session.save(Value(std::move(product)));
  write_output(emit_document(doc, style_of(compact)), out_path);
  return kOk;
}

int run_upgrade(const std::string& path, const std::string& target,
                const std::string& out_path, bool compact) {
  Document doc = parse_document(read_file(path));
  if (doc.ns.size() == 0) throw Error("document declares no namespace");
  const std::string ns = doc.ns.at_index(0).first;

  UpgradeRegistry registry;
  register_legacy_oscar_scripts(registry);
  Document upgraded = upgrade(doc, ns, target, registry);
  write_output(emit_document(upgraded, style_of(compact)), out_path);
  return kOk;
}

int run_compress(const std::string& path, const std::string& tree_path,
                 const std::string& out_path, bool compact, bool unpack) {
  Document doc = parse_document(read_file(path));
  Document result = unpack ? decompress_subtree(doc, tree_path)
                           : compress_subtree(doc, tree_path);
  write_output(emit_document(result, style_of(compact)), out_path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrdikit: save, check, and continue computer algebra data"};
  app.require_subcommand(1);

  std::vector<std::string> paths;
  std::string schema_path, out_path, target_version, tree_path;
  bool compact = false;
  bool print_schema = false;

  CLI::App* validate = app.add_subcommand("validate", "check files against a schema");
  validate->add_option("paths", paths, "input files")->required();
  validate->add_option("--schema", schema_path, "schema file override");

  CLI::App* show = app.add_subcommand("show", "render a file's structure");
  show->add_option("path", paths, "input file")->required();

  CLI::App* roundtrip =
      app.add_subcommand("roundtrip", "load, save afresh, load, compare");
  roundtrip->add_option("path", paths, "input file")->required();

  CLI::App* mulmv = app.add_subcommand(
      "mulmv", "multiply a saved matrix by a saved vector");
  mulmv->add_option("matrix", paths, "matrix file then vector file")
      ->expected(2)
      ->required();
  mulmv->add_option("--out", out_path, "output file (default: stdout)");
  mulmv->add_flag("--compact", compact, "single-line output");

  CLI::App* upgrade = app.add_subcommand("upgrade", "apply registered upgrade scripts");
  upgrade->add_option("path", paths, "input file")->required();
  upgrade->add_option("--to", target_version, "target version")->required();
  upgrade->add_option("--out", out_path, "output file (default: stdout)");
  upgrade->add_flag("--compact", compact, "single-line output");

  CLI::App* compress =
      app.add_subcommand("compress", "fold a subtree into a compressed marker");
  compress->add_option("path", paths, "input file then tree path, e.g. /data")
      ->expected(2)
      ->required();
  compress->add_option("--out", out_path, "output file (default: stdout)");
  compress->add_flag("--compact", compact, "single-line output");

  CLI::App* decompress =
      app.add_subcommand("decompress", "restore a compressed subtree");
  decompress->add_option("path", paths, "input file then tree path")
      ->expected(2)
      ->required();
  decompress->add_option("--out", out_path, "output file (default: stdout)");
  decompress->add_flag("--compact", compact, "single-line output");

  CLI::App* schema = app.add_subcommand("schema", "print the built-in schema");
  schema->add_flag("--print", print_schema, "print the schema text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (validate->parsed()) return run_validate(paths, schema_path);
    if (show->parsed()) return run_show(paths.at(0));
    if (roundtrip->parsed()) return run_roundtrip(paths.at(0));
    if (mulmv->parsed())
      return run_mulmv(paths.at(0), paths.at(1), out_path, compact);
    if (upgrade->parsed())
      return run_upgrade(paths.at(0), target_version, out_path, compact);
    if (compress->parsed())
      return run_compress(paths.at(0), paths.at(1), out_path, compact, false);
    if (decompress->parsed())
      return run_compress(paths.at(0), paths.at(1), out_path, compact, true);
    if (schema->parsed()) {
      (void)print_schema;  // printing is this command's only action
      std::cout << builtin_mrdi_schema_text() << "\n";
      return kOk;
    }
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSemantic;
  }
  return kUsage;
}
