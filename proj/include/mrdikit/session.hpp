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
#ifndef MRDIKIT_SESSION_HPP
#define MRDIKIT_SESSION_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mrdikit/algebra.hpp"
#include "mrdikit/document.hpp"
#include "mrdikit/errors.hpp"
#include "mrdikit/uuid.hpp"
#include "mrdikit/value.hpp"
#include "mrdikit/value_tree.hpp"

namespace mrdikit {

// serialized type names

inline const char* ring_type_name(RingKind k) {
  switch (k) {
    case RingKind::Rationals: return "QQField";
    case RingKind::Prime: return "fpField";
    case RingKind::UnivPoly: return "PolyRing";
    case RingKind::Fq: return "fqPolyRepField";
    case RingKind::MPoly: return "MPolyRing";
  }
  throw CodecError("unknown ring kind");
}

inline const char* elem_type_name(RingKind k) {
  switch (k) {
    case RingKind::Rationals: return "QQFieldElem";
    case RingKind::Prime: return "fpFieldElem";
    case RingKind::UnivPoly: return "PolyRingElem";
    case RingKind::Fq: return "fqPolyRepFieldElem";
    case RingKind::MPoly: return "MPolyRingElem";
  }
  throw CodecError("unknown ring kind");
}

/// Leaf rings are cheap enough to inline inside their consumer's data;
/// parametric rings always go through the reference table.
inline bool is_leaf_ring_kind(RingKind k) {
  return k == RingKind::Prime || k == RingKind::Rationals;
}

inline std::string type_name_for_value(const Value& v) {
  if (v.is_bigint()) return "ZZRingElem";
  if (v.is_elem()) return elem_type_name(v.as_elem().parent->kind());
  if (v.is_ring()) return ring_type_name(v.as_ring()->kind());
  if (v.is_vector()) return "Vector";
  if (v.is_matrix()) return "Matrix";
  if (v.is_tuple()) return "Tuple";
  return v.as_opaque().type_name;
}

// numeric payload encoding: always strings out, bare integers tolerated in

inline BigInt bigint_from_node(const ValueTree& t) {
  if (t.is_text()) return bigint_from_decimal(t.as_text());
  if (t.is_number()) {
    if (!t.is_integer_token())
      throw CodecError("expected an integer, found the number " +
                       t.as_number_token());
    return bigint_from_decimal(t.as_number_token());
  }
  throw CodecError("expected an integer encoded as a string");
}

inline std::string rational_to_string(const Rational& q) {
  if (q.den == 1) return q.num.str();
  return q.num.str() + "//" + q.den.str();
}

inline Rational rational_from_string(std::string_view s) {
  std::size_t pos = s.find("//");
  if (pos == std::string_view::npos)
    return Rational(bigint_from_decimal(s), 1);
  return Rational(bigint_from_decimal(s.substr(0, pos)),
                  bigint_from_decimal(s.substr(pos + 2)));
}

/// Element payloads carry no references, so they encode context-free:
/// residues and degrees as decimal strings, polynomials as sparse
/// [exponent, coefficient] pair arrays.
inline ValueTree encode_elem_data(const Elem& e) {
  switch (e.parent->kind()) {
    case RingKind::Prime:
      return ValueTree::text(prime_value(e).str());
    case RingKind::Rationals:
      return ValueTree::text(rational_to_string(rational_value(e)));
    case RingKind::UnivPoly:
    case RingKind::Fq: {
      ValueTree arr = ValueTree::array();
      for (const auto& t : univ_terms(e)) {
        ValueTree pair = ValueTree::array();
        pair.push_back(ValueTree::text(t.deg.str()));
        pair.push_back(encode_elem_data(t.coeff));
        arr.push_back(std::move(pair));
      }
      return arr;
    }
    case RingKind::MPoly: {
      ValueTree arr = ValueTree::array();
      for (const auto& t : mpoly_terms(e)) {
        ValueTree pair = ValueTree::array();
        ValueTree exps = ValueTree::array();
        for (const auto& x : t.exps) exps.push_back(ValueTree::text(x.str()));
        pair.push_back(std::move(exps));
        pair.push_back(encode_elem_data(t.coeff));
        arr.push_back(std::move(pair));
      }
      return arr;
    }
  }
  throw CodecError("unknown ring kind");
}

/// Inverse of encode_elem_data for a known parent ring. Term order in the
/// input is free; residues and generator powers are reduced; duplicate
/// exponents and arity mismatches are errors.
inline Elem decode_elem_data(const RingPtr& ring, const ValueTree& data) {
  switch (ring->kind()) {
    case RingKind::Prime:
      return make_prime_elem(ring, bigint_from_node(data));
    case RingKind::Rationals: {
      if (data.is_text()) return make_rational_elem(rational_from_string(data.as_text()));
      if (data.is_number())
        return make_rational_elem(Rational(bigint_from_node(data), 1));
      throw CodecError("expected a rational encoded as a string");
    }
    case RingKind::UnivPoly:
    case RingKind::Fq: {
      if (!data.is_array())
        throw CodecError("polynomial data must be an array of terms");
      const RingPtr& base = ring->kind() == RingKind::UnivPoly
                                ? as_univ_poly_ring(*ring).base()
                                : as_fq_field(*ring).prime_field();
      std::vector<std::pair<BigInt, Elem>> terms;
      for (const auto& item : data.items()) {
        if (!item.is_array() || item.size() != 2)
          throw CodecError(
              "each polynomial term must be an [exponent, coefficient] pair");
        terms.emplace_back(bigint_from_node(item.items()[0]),
                           decode_elem_data(base, item.items()[1]));
      }
      return ring->kind() == RingKind::UnivPoly
                 ? make_univ_poly(ring, std::move(terms))
                 : make_fq_elem(ring, std::move(terms));
    }
    case RingKind::MPoly: {
      if (!data.is_array())
        throw CodecError("polynomial data must be an array of terms");
      const RingPtr& base = as_mpoly_ring(*ring).base();
      std::vector<std::pair<std::vector<BigInt>, Elem>> terms;
      for (const auto& item : data.items()) {
        if (!item.is_array() || item.size() != 2 || !item.items()[0].is_array())
          throw CodecError(
              "each term must be an [[exponents...], coefficient] pair");
        std::vector<BigInt> exps;
        for (const auto& x : item.items()[0].items())
          exps.push_back(bigint_from_node(x));
        terms.emplace_back(std::move(exps),
                           decode_elem_data(base, item.items()[1]));
      }
      return make_mpoly(ring, std::move(terms));
    }
  }
  throw CodecError("unknown ring kind");
}

struct SaveCtx;
struct LoadCtx;

/// Resolved type parameters, produced once per document (or once per
/// container, so entries share one decoded parent).
struct ParamContext {
  RingPtr ring;                              // element codecs
  std::optional<TypeDescriptor> entry_type;  // Vector and Matrix
  std::vector<TypeDescriptor> entry_types;   // Tuple
  std::optional<ValueTree> raw;              // custom codecs
};

/// One serializable type: its wire name and four transformation hooks.
/// Law: decode_data(decode_params(encode_params(v)), encode_data(v))
/// equals v for every value of the codec's type.
struct Codec {
  std::string type_name;
  std::function<std::optional<ValueTree>(const Value&, SaveCtx&)> encode_params;
  std::function<std::optional<ValueTree>(const Value&, SaveCtx&)> encode_data;
  std::function<ParamContext(const std::optional<ValueTree>&, LoadCtx&)>
      decode_params;
  std::function<Value(const ParamContext&, const std::optional<ValueTree>&,
                      LoadCtx&)>
      decode_data;
};

class Session;
inline std::size_t register_builtin_codecs(Session& session);

/// The lifetime within which UUID-to-ring bindings hold. Saving binds the
/// transitively needed rings to fresh UUIDs (reused on later saves), and
/// loading recognizes already-bound UUIDs, returning the same in-memory
/// ring object across files.
///
/// A session must be confined to one thread while saving or loading;
/// independent sessions are fully isolated.
class Session {
 public:
  struct NoBuiltins {};

  /// Default session: built-in codecs registered. The UUID stream honors
  /// the MRDIKIT_UUID_SEED environment variable, otherwise it is random.
  Session() { register_builtin_codecs(*this); }
  /// Deterministic UUID stream, built-in codecs registered.
  explicit Session(std::uint64_t uuid_seed) : uuids_(uuid_seed) {
    register_builtin_codecs(*this);
  }
  /// Empty codec registry, for explicit registration flows.
  explicit Session(NoBuiltins) {}

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void set_namespace(std::string name, std::string url, std::string version) {
    ns_name_ = std::move(name);
    ns_url_ = std::move(url);
    ns_version_ = std::move(version);
  }
  const std::string& namespace_name() const { return ns_name_; }
  const std::string& namespace_url() const { return ns_url_; }
  const std::string& namespace_version() const { return ns_version_; }

  void register_codec(Codec codec) {
    if (codec.type_name.empty())
      throw CodecError("codec needs a nonempty type name");
    if (codecs_.count(codec.type_name))
      throw CodecError("a codec for \"" + codec.type_name +
                       "\" is already registered");
    codecs_.emplace(codec.type_name, std::move(codec));
  }
  std::size_t codec_count() const { return codecs_.size(); }
  bool has_codec(std::string_view name) const {
    return codecs_.count(std::string(name)) > 0;
  }

  /// Codec lookup with alias tolerance: an unknown dotted name retries
  /// with everything through the last '.' stripped, so "Nemo.fpField"
  /// finds the codec registered as "fpField". Emission always uses the
  /// registered name.
  const Codec& find_codec(std::string_view name) const {
    auto it = codecs_.find(std::string(name));
    if (it == codecs_.end()) {
      std::size_t dot = name.rfind('.');
      if (dot != std::string_view::npos)
        it = codecs_.find(std::string(name.substr(dot + 1)));
    }
    if (it == codecs_.end())
      throw CodecError("no codec registered for type \"" + std::string(name) +
                       "\"");
    return it->second;
  }

  // UUID bindings; mutually inverse, never rebound

  std::optional<std::string> uuid_of(const RingPtr& ring) const {
    auto it = uuid_of_.find(ring.get());
    if (it == uuid_of_.end()) return std::nullopt;
    return it->second;
  }
  RingPtr object_of(const std::string& uuid) const {
    auto it = object_of_.find(uuid);
    if (it == object_of_.end()) return nullptr;
    return it->second;
  }
  /// The ring's session UUID, minting a fresh one on first need.
  std::string bind(const RingPtr& ring) {
    auto it = uuid_of_.find(ring.get());
    if (it != uuid_of_.end()) return it->second;
    std::string uuid = uuids_.next();
    uuid_of_.emplace(ring.get(), uuid);
    object_of_.emplace(uuid, ring);
    return uuid;
  }
  /// Load-side binding of a UUID from a file to a freshly built ring.
  void bind_loaded(const std::string& uuid, const RingPtr& ring) {
    auto it = object_of_.find(uuid);
    if (it != object_of_.end()) {
      if (it->second.get() != ring.get())
        throw CodecError("UUID " + uuid +
                         " is already bound to a different object");
      return;
    }
    object_of_.emplace(uuid, ring);
    uuid_of_.emplace(ring.get(), uuid);
  }

  /// Inline leaf encodings carry no UUID, so the session canonicalizes
  /// prime fields by modulus to keep parent identity stable across a
  /// save/load cycle. First registration wins.
  RingPtr canonical_prime_field(const BigInt& p) {
    auto it = prime_cache_.find(p.str());
    if (it != prime_cache_.end()) return it->second;
    RingPtr ring = make_prime_field(p);
    prime_cache_.emplace(p.str(), ring);
    return ring;
  }
  void note_prime_field(const RingPtr& ring) {
    const BigInt& p = as_prime_field(*ring).modulus();
    prime_cache_.emplace(p.str(), ring);
  }

  Document save(const Value& value, const Metadata* meta = nullptr);
  Document save_tuple(const std::vector<Value>& entries,
                      const Metadata* meta = nullptr);
  Value load(const Document& doc);

 private:
  std::unordered_map<const Ring*, std::string> uuid_of_;
  std::unordered_map<std::string, RingPtr> object_of_;
  std::map<std::string, RingPtr> prime_cache_;
  std::map<std::string, Codec> codecs_;
  std::string ns_name_ = "Oscar";
  std::string ns_url_ = "https://github.com/oscar-system/Oscar.jl";
  std::string ns_version_ = "0.13.0-DEV";
  UuidSource uuids_;
};

/// Save-side context: the session for bindings and the document under
/// construction for reference-table insertion.
struct SaveCtx {
  Session& session;
  Document& doc;

  /// The UUID for a parametric ring, inserting its encoded entry into the
  /// document's reference table on first use. Entries appear in first-use
  /// order; a placeholder reserves the slot before recursive encoding so
  /// the order is outside-in.
  std::string ref_for(const RingPtr& ring);

  /// How a ring appears as a parameter: leaf rings inline as a small
  /// {_type, data} object, parametric rings as their UUID string.
  ValueTree ring_param_tree(const RingPtr& ring);

  /// Full type descriptor for a container entry.
  TypeDescriptor descriptor_for_value(const Value& v);
};

/// Load-side context: the session for bindings and the source document
/// for reference resolution.
struct LoadCtx {
  Session& session;
  const Document& doc;

  RingPtr ring_from_param_tree(const ValueTree& t);
  Value decode_typed(const TypeDescriptor& td,
                     const std::optional<ValueTree>& data);
  Value decode_ref_entry(const RefEntry& entry);
};

namespace detail {

inline const ValueTree& require_data(const std::optional<ValueTree>& data,
                                     const char* type_name) {
  if (!data)
    throw CodecError(std::string(type_name) + " requires a data payload");
  return *data;
}

inline const ValueTree& require_params(const std::optional<ValueTree>& params,
                                       const char* type_name) {
  if (!params)
    throw CodecError(std::string(type_name) + " requires type parameters");
  return *params;
}

inline RingPtr require_ring_kind(RingPtr ring, RingKind kind,
                                 const char* type_name) {
  if (!ring || ring->kind() != kind)
    throw CodecError(std::string(type_name) +
                     " parameters do not describe the right kind of ring");
  return ring;
}

/// Shared save-side checks for Vector and Matrix: entries must be all
/// plain integers or all elements over one identical parent ring.
inline void check_homogeneous(const std::vector<Value>& entries,
                              const char* what) {
  if (entries.empty())
    throw CodecError(std::string("cannot infer the element type of an empty ") +
                     what);
  const bool ints = entries.front().is_bigint();
  const Ring* parent =
      entries.front().is_elem() ? entries.front().as_elem().parent.get()
                                : nullptr;
  for (const auto& e : entries) {
    bool ok = ints ? e.is_bigint()
                   : (e.is_elem() && e.as_elem().parent.get() == parent);
    if (!ok)
      throw CodecError(
          std::string(what) +
          " entries must all share one parent ring (object identity); "
          "heterogeneous collections require a Tuple");
  }
}

inline ValueTree encode_entry_data(const Value& v) {
  if (v.is_bigint()) return ValueTree::text(v.as_bigint().str());
  return encode_elem_data(v.as_elem());
}

/// Entry decoding for Vector and Matrix against the container's single,
/// already-resolved parameter context.
inline Value decode_shared_entry(const ParamContext& pc, const ValueTree& t,
                                 LoadCtx& ctx) {
  const std::string& name =
      ctx.session.find_codec(pc.entry_type->name).type_name;
  if (name == "ZZRingElem") return Value(bigint_from_node(t));
  if (!pc.ring)
    throw CodecError("element type " + name + " requires ring parameters");
  if (elem_type_name(pc.ring->kind()) != name)
    throw CodecError("parameters do not match the declared element type " +
                     name);
  return Value(decode_elem_data(pc.ring, t));
}

inline ParamContext decode_container_params(
    const std::optional<ValueTree>& params, LoadCtx& ctx,
    const char* type_name) {
  ParamContext pc;
  const ValueTree& p = require_params(params, type_name);
  pc.entry_type = TypeDescriptor::from_tree(p, "/_type/params");
  if (pc.entry_type->params)
    pc.ring = ctx.ring_from_param_tree(*pc.entry_type->params);
  return pc;
}

}  // namespace detail

/// The fourteen built-in codecs.
inline std::vector<Codec> builtin_codecs() {
  std::vector<Codec> out;
  auto no_params = [](const Value&, SaveCtx&) -> std::optional<ValueTree> {
    return std::nullopt;
  };
  auto pass_params = [](const std::optional<ValueTree>& params,
                        LoadCtx&) -> ParamContext {
    ParamContext pc;
    pc.raw = params;
    return pc;
  };

  // singleton field of rationals: no params, no data
  out.push_back(Codec{
      "QQField", no_params,
      [](const Value&, SaveCtx&) -> std::optional<ValueTree> {
        return std::nullopt;
      },
      pass_params,
      [](const ParamContext&, const std::optional<ValueTree>&, LoadCtx&) {
        return Value(rational_field());
      }});

  out.push_back(Codec{
      "ZZRingElem", no_params,
      [](const Value& v, SaveCtx&) -> std::optional<ValueTree> {
        return ValueTree::text(v.as_bigint().str());
      },
      pass_params,
      [](const ParamContext&, const std::optional<ValueTree>& data, LoadCtx&) {
        return Value(bigint_from_node(detail::require_data(data, "ZZRingElem")));
      }});

  out.push_back(Codec{
      "QQFieldElem",
      [](const Value&, SaveCtx&) -> std::optional<ValueTree> {
        ValueTree inline_ring = ValueTree::map();
        inline_ring.set("_type", ValueTree::text("QQField"));
        return inline_ring;
      },
      [](const Value& v, SaveCtx&) -> std::optional<ValueTree> {
        return ValueTree::text(rational_to_string(rational_value(v.as_elem())));
      },
      [](const std::optional<ValueTree>& params, LoadCtx& ctx) -> ParamContext {
        ParamContext pc;
        pc.ring = params ? detail::require_ring_kind(
                               ctx.ring_from_param_tree(*params),
                               RingKind::Rationals, "QQFieldElem")
                         : rational_field();
        return pc;
      },
      [](const ParamContext& pc, const std::optional<ValueTree>& data,
         LoadCtx&) {
        return Value(decode_elem_data(
            pc.ring, detail::require_data(data, "QQFieldElem")));
      }});

  out.push_back(Codec{
      "fpField", no_params,
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        ctx.session.note_prime_field(v.as_ring());
        return ValueTree::text(as_prime_field(*v.as_ring()).modulus().str());
      },
      pass_params,
      [](const ParamContext&, const std::optional<ValueTree>& data,
         LoadCtx& ctx) {
        return Value(ctx.session.canonical_prime_field(
            bigint_from_node(detail::require_data(data, "fpField"))));
      }});

  out.push_back(Codec{
      "fpFieldElem",
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        return ctx.ring_param_tree(v.as_elem().parent);
      },
      [](const Value& v, SaveCtx&) -> std::optional<ValueTree> {
        return encode_elem_data(v.as_elem());
      },
      [](const std::optional<ValueTree>& params, LoadCtx& ctx) -> ParamContext {
        ParamContext pc;
        pc.ring = detail::require_ring_kind(
            ctx.ring_from_param_tree(
                detail::require_params(params, "fpFieldElem")),
            RingKind::Prime, "fpFieldElem");
        return pc;
      },
      [](const ParamContext& pc, const std::optional<ValueTree>& data,
         LoadCtx&) {
        return Value(decode_elem_data(
            pc.ring, detail::require_data(data, "fpFieldElem")));
      }});

  out.push_back(Codec{
      "PolyRing", no_params,
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        const auto& ring = as_univ_poly_ring(*v.as_ring());
        ValueTree data = ValueTree::map();
        data.set("base_ring", ctx.ring_param_tree(ring.base()));
        ValueTree symbols = ValueTree::array();
        symbols.push_back(ValueTree::text(ring.symbol()));
        data.set("symbols", std::move(symbols));
        return data;
      },
      pass_params,
      [](const ParamContext&, const std::optional<ValueTree>& data,
         LoadCtx& ctx) {
        const ValueTree& d = detail::require_data(data, "PolyRing");
        if (!d.is_map() || !d.contains("base_ring") || !d.contains("symbols"))
          throw CodecError("PolyRing data needs base_ring and symbols");
        RingPtr base = ctx.ring_from_param_tree(*d.find("base_ring"));
        const ValueTree& syms = *d.find("symbols");
        if (!syms.is_array() || syms.size() != 1 || !syms.items()[0].is_text())
          throw CodecError("PolyRing needs exactly one symbol");
        return Value(make_poly_ring(std::move(base), syms.items()[0].as_text()));
      }});

  out.push_back(Codec{
      "PolyRingElem",
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        return ValueTree::text(ctx.ref_for(v.as_elem().parent));
      },
      [](const Value& v, SaveCtx&) -> std::optional<ValueTree> {
        return encode_elem_data(v.as_elem());
      },
      [](const std::optional<ValueTree>& params, LoadCtx& ctx) -> ParamContext {
        ParamContext pc;
        pc.ring = detail::require_ring_kind(
            ctx.ring_from_param_tree(
                detail::require_params(params, "PolyRingElem")),
            RingKind::UnivPoly, "PolyRingElem");
        return pc;
      },
      [](const ParamContext& pc, const std::optional<ValueTree>& data,
         LoadCtx&) {
        return Value(decode_elem_data(
            pc.ring, detail::require_data(data, "PolyRingElem")));
      }});

  out.push_back(Codec{
      "fqPolyRepField", no_params,
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        const auto& field = as_fq_field(*v.as_ring());
        ValueTree desc = ValueTree::map();
        desc.set("name", ValueTree::text("PolyRingElem"));
        desc.set("params", ValueTree::text(ctx.ref_for(field.poly_ring())));
        ValueTree def_pol = ValueTree::map();
        def_pol.set("_type", std::move(desc));
        def_pol.set("data", encode_elem_data(field.def_pol()));
        ValueTree data = ValueTree::map();
        data.set("def_pol", std::move(def_pol));
        return data;
      },
      pass_params,
      [](const ParamContext&, const std::optional<ValueTree>& data,
         LoadCtx& ctx) {
        const ValueTree& d = detail::require_data(data, "fqPolyRepField");
        if (!d.is_map() || !d.contains("def_pol"))
          throw CodecError("fqPolyRepField data needs def_pol");
        const ValueTree& dp = *d.find("def_pol");
        if (!dp.is_map() || !dp.contains("_type") || !dp.contains("data"))
          throw CodecError("def_pol needs _type and data");
        TypeDescriptor td =
            TypeDescriptor::from_tree(*dp.find("_type"), "/def_pol/_type");
        if (ctx.session.find_codec(td.name).type_name != "PolyRingElem")
          throw CodecError("def_pol must be a univariate polynomial element");
        RingPtr poly_ring = detail::require_ring_kind(
            ctx.ring_from_param_tree(
                detail::require_params(td.params, "def_pol")),
            RingKind::UnivPoly, "def_pol");
        Elem def_pol = decode_elem_data(poly_ring, *dp.find("data"));
        // permissive: published constructions survive loading even when
        // the desk-scale check finds the polynomial reducible
        return Value(make_fq_field(std::move(def_pol), CheckPolicy::Permissive));
      }});

  out.push_back(Codec{
      "fqPolyRepFieldElem",
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        return ValueTree::text(ctx.ref_for(v.as_elem().parent));
      },
      [](const Value& v, SaveCtx&) -> std::optional<ValueTree> {
        return encode_elem_data(v.as_elem());
      },
      [](const std::optional<ValueTree>& params, LoadCtx& ctx) -> ParamContext {
        ParamContext pc;
        pc.ring = detail::require_ring_kind(
            ctx.ring_from_param_tree(
                detail::require_params(params, "fqPolyRepFieldElem")),
            RingKind::Fq, "fqPolyRepFieldElem");
        return pc;
      },
      [](const ParamContext& pc, const std::optional<ValueTree>& data,
         LoadCtx&) {
        return Value(decode_elem_data(
            pc.ring, detail::require_data(data, "fqPolyRepFieldElem")));
      }});

  out.push_back(Codec{
      "MPolyRing", no_params,
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        const auto& ring = as_mpoly_ring(*v.as_ring());
        ValueTree data = ValueTree::map();
        data.set("base_ring", ctx.ring_param_tree(ring.base()));
        ValueTree symbols = ValueTree::array();
        for (const auto& s : ring.symbols())
          symbols.push_back(ValueTree::text(s));
        data.set("symbols", std::move(symbols));
        return data;
      },
      pass_params,
      [](const ParamContext&, const std::optional<ValueTree>& data,
         LoadCtx& ctx) {
        const ValueTree& d = detail::require_data(data, "MPolyRing");
        if (!d.is_map() || !d.contains("base_ring") || !d.contains("symbols"))
          throw CodecError("MPolyRing data needs base_ring and symbols");
        RingPtr base = ctx.ring_from_param_tree(*d.find("base_ring"));
        const ValueTree& syms = *d.find("symbols");
        if (!syms.is_array() || syms.size() == 0)
          throw CodecError("MPolyRing needs at least one symbol");
        std::vector<std::string> symbols;
        for (const auto& s : syms.items()) {
          if (!s.is_text()) throw CodecError("symbols must be strings");
          symbols.push_back(s.as_text());
        }
        return Value(make_mpoly_ring(std::move(base), std::move(symbols)));
      }});

  out.push_back(Codec{
      "MPolyRingElem",
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        return ValueTree::text(ctx.ref_for(v.as_elem().parent));
      },
      [](const Value& v, SaveCtx&) -> std::optional<ValueTree> {
        return encode_elem_data(v.as_elem());
      },
      [](const std::optional<ValueTree>& params, LoadCtx& ctx) -> ParamContext {
        ParamContext pc;
        pc.ring = detail::require_ring_kind(
            ctx.ring_from_param_tree(
                detail::require_params(params, "MPolyRingElem")),
            RingKind::MPoly, "MPolyRingElem");
        return pc;
      },
      [](const ParamContext& pc, const std::optional<ValueTree>& data,
         LoadCtx&) {
        return Value(decode_elem_data(
            pc.ring, detail::require_data(data, "MPolyRingElem")));
      }});

  out.push_back(Codec{
      "Vector",
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        const auto& entries = v.as_vector().entries;
        detail::check_homogeneous(entries, "vector");
        return ctx.descriptor_for_value(entries.front()).to_tree();
      },
      [](const Value& v, SaveCtx&) -> std::optional<ValueTree> {
        ValueTree arr = ValueTree::array();
        for (const auto& e : v.as_vector().entries)
          arr.push_back(detail::encode_entry_data(e));
        return arr;
      },
      [](const std::optional<ValueTree>& params, LoadCtx& ctx) -> ParamContext {
        return detail::decode_container_params(params, ctx, "Vector");
      },
      [](const ParamContext& pc, const std::optional<ValueTree>& data,
         LoadCtx& ctx) {
        const ValueTree& d = detail::require_data(data, "Vector");
        if (!d.is_array()) throw CodecError("Vector data must be an array");
        VectorVal out;
        for (const auto& item : d.items())
          out.entries.push_back(detail::decode_shared_entry(pc, item, ctx));
        return Value(std::move(out));
      }});

  out.push_back(Codec{
      "Matrix",
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        const auto& m = v.as_matrix();
        if (m.entries.size() != m.rows * m.cols)
          throw CodecError("matrix entry count does not match its shape");
        detail::check_homogeneous(m.entries, "matrix");
        return ctx.descriptor_for_value(m.entries.front()).to_tree();
      },
      [](const Value& v, SaveCtx&) -> std::optional<ValueTree> {
        const auto& m = v.as_matrix();
        ValueTree rows = ValueTree::array();
        for (std::size_t r = 0; r < m.rows; ++r) {
          ValueTree row = ValueTree::array();
          for (std::size_t c = 0; c < m.cols; ++c)
            row.push_back(detail::encode_entry_data(m.at(r, c)));
          rows.push_back(std::move(row));
        }
        return rows;
      },
      [](const std::optional<ValueTree>& params, LoadCtx& ctx) -> ParamContext {
        return detail::decode_container_params(params, ctx, "Matrix");
      },
      [](const ParamContext& pc, const std::optional<ValueTree>& data,
         LoadCtx& ctx) {
        const ValueTree& d = detail::require_data(data, "Matrix");
        if (!d.is_array()) throw CodecError("Matrix data must be an array of rows");
        MatrixVal out;
        out.rows = d.size();
        for (std::size_t r = 0; r < d.size(); ++r) {
          const ValueTree& row = d.items()[r];
          if (!row.is_array())
            throw CodecError("Matrix rows must be arrays");
          if (r == 0) {
            out.cols = row.size();
          } else if (row.size() != out.cols) {
            throw CodecError("Matrix rows have inconsistent lengths");
          }
          for (const auto& item : row.items())
            out.entries.push_back(detail::decode_shared_entry(pc, item, ctx));
        }
        if (out.rows == 0) out.cols = 0;
        return Value(std::move(out));
      }});

  out.push_back(Codec{
      "Tuple",
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        ValueTree arr = ValueTree::array();
        for (const auto& e : v.as_tuple().entries)
          arr.push_back(ctx.descriptor_for_value(e).to_tree());
        return arr;
      },
      [](const Value& v, SaveCtx& ctx) -> std::optional<ValueTree> {
        ValueTree arr = ValueTree::array();
        for (const auto& e : v.as_tuple().entries) {
          const Codec& c = ctx.session.find_codec(type_name_for_value(e));
          std::optional<ValueTree> data = c.encode_data(e, ctx);
          arr.push_back(data ? std::move(*data) : ValueTree::null());
        }
        return arr;
      },
      [](const std::optional<ValueTree>& params, LoadCtx&) -> ParamContext {
        ParamContext pc;
        const ValueTree& p = detail::require_params(params, "Tuple");
        if (!p.is_array())
          throw CodecError("Tuple params must be an array of type descriptors");
        for (std::size_t i = 0; i < p.size(); ++i)
          pc.entry_types.push_back(TypeDescriptor::from_tree(
              p.items()[i], "/_type/params/" + std::to_string(i)));
        return pc;
      },
      [](const ParamContext& pc, const std::optional<ValueTree>& data,
         LoadCtx& ctx) {
        const ValueTree& d = detail::require_data(data, "Tuple");
        if (!d.is_array() || d.size() != pc.entry_types.size())
          throw CodecError(
              "Tuple data must be an array matching its params in length");
        TupleVal out;
        for (std::size_t i = 0; i < d.size(); ++i) {
          const ValueTree& item = d.items()[i];
          out.entries.push_back(ctx.decode_typed(
              pc.entry_types[i],
              item.is_null() ? std::nullopt : std::optional<ValueTree>(item)));
        }
        return Value(std::move(out));
      }});

  return out;
}

inline std::size_t register_builtin_codecs(Session& session) {
  std::vector<Codec> codecs = builtin_codecs();
  for (auto& c : codecs) session.register_codec(std::move(c));
  return codecs.size();
}

/// A generic codec for values outside the algebra kernel: params and data
/// trees pass through verbatim under the given type name.
inline Codec make_opaque_codec(std::string type_name) {
  Codec c;
  c.type_name = type_name;
  c.encode_params = [](const Value& v, SaveCtx&) { return v.as_opaque().params; };
  c.encode_data = [](const Value& v, SaveCtx&) { return v.as_opaque().data; };
  c.decode_params = [](const std::optional<ValueTree>& params, LoadCtx&) {
    ParamContext pc;
    pc.raw = params;
    return pc;
  };
  c.decode_data = [name = std::move(type_name)](
                      const ParamContext& pc,
                      const std::optional<ValueTree>& data, LoadCtx&) {
    return Value(OpaqueValue{name, pc.raw, data});
  };
  return c;
}

inline std::string SaveCtx::ref_for(const RingPtr& ring) {
  std::string uuid = session.bind(ring);
  if (!doc.refs.contains(uuid)) {
    doc.refs.insert_new(uuid, RefEntry{});
    const Codec& codec = session.find_codec(ring_type_name(ring->kind()));
    RefEntry entry;
    entry.type_desc = TypeDescriptor{codec.type_name, std::nullopt};
    entry.data = codec.encode_data(Value(ring), *this);
    *doc.refs.find(uuid) = std::move(entry);
  }
  return uuid;
}

inline ValueTree SaveCtx::ring_param_tree(const RingPtr& ring) {
  if (is_leaf_ring_kind(ring->kind())) {
    ValueTree inline_ring = ValueTree::map();
    inline_ring.set("_type", ValueTree::text(ring_type_name(ring->kind())));
    const Codec& codec = session.find_codec(ring_type_name(ring->kind()));
    if (std::optional<ValueTree> data = codec.encode_data(Value(ring), *this))
      inline_ring.set("data", std::move(*data));
    return inline_ring;
  }
  return ValueTree::text(ref_for(ring));
}

inline TypeDescriptor SaveCtx::descriptor_for_value(const Value& v) {
  if (v.is_ring())
    throw CodecError(
        "a ring cannot be a container entry; save it as its own document");
  const Codec& codec = session.find_codec(type_name_for_value(v));
  TypeDescriptor td;
  td.name = codec.type_name;
  td.params = codec.encode_params(v, *this);
  return td;
}

inline RingPtr LoadCtx::ring_from_param_tree(const ValueTree& t) {
  if (t.is_text()) {
    const std::string& uuid = t.as_text();
    if (!is_uuid(uuid))
      throw CodecError("ring parameter \"" + uuid +
                       "\" is neither a UUID nor an inline ring");
    RingPtr ring = session.object_of(uuid);
    if (!ring)
      throw CodecError("UUID " + uuid + " is not bound in this session");
    return ring;
  }
  if (t.is_map()) {
    if (!t.contains("_type"))
      throw CodecError("inline ring needs a _type");
    TypeDescriptor td = TypeDescriptor::from_tree(*t.find("_type"), "/_type");
    RefEntry entry;
    entry.type_desc = std::move(td);
    if (const ValueTree* data = t.find("data")) entry.data = *data;
    Value v = decode_ref_entry(entry);
    if (!v.is_ring())
      throw CodecError("inline ring parameter does not decode to a ring");
    return v.as_ring();
  }
  throw CodecError("ring parameter must be a UUID string or an inline object");
}

inline Value LoadCtx::decode_typed(const TypeDescriptor& td,
                                   const std::optional<ValueTree>& data) {
  const Codec& codec = session.find_codec(td.name);
  ParamContext pc = codec.decode_params(td.params, *this);
  return codec.decode_data(pc, data, *this);
}

inline Value LoadCtx::decode_ref_entry(const RefEntry& entry) {
  return decode_typed(entry.type_desc, entry.data);
}

inline Document Session::save(const Value& value, const Metadata* meta) {
  Document doc;
  doc.ns.set(ns_name_, NamespaceEntry{ns_url_, ns_version_});
  SaveCtx ctx{*this, doc};
  const Codec& codec = find_codec(type_name_for_value(value));
  doc.type_desc.name = codec.type_name;
  doc.type_desc.params = codec.encode_params(value, ctx);
  doc.data = codec.encode_data(value, ctx);
  if (meta) doc.meta = *meta;
  doc.verify();
  return doc;
}

inline Document Session::save_tuple(const std::vector<Value>& entries,
                                    const Metadata* meta) {
  TupleVal t;
  t.entries = entries;
  return save(Value(std::move(t)), meta);
}

inline Value Session::load(const Document& doc) {
  doc.verify();
  LoadCtx ctx{*this, doc};
  for (const std::string& uuid : ref_dependency_order(doc)) {
    if (object_of(uuid)) continue;  // recognized from an earlier file
    const RefEntry* entry = doc.refs.find(uuid);
    Value ring = ctx.decode_ref_entry(*entry);
    if (!ring.is_ring())
      throw CodecError("reference " + uuid + " does not decode to a ring");
    bind_loaded(uuid, ring.as_ring());
  }
  const Codec& codec = find_codec(doc.type_desc.name);
  ParamContext pc = codec.decode_params(doc.type_desc.params, ctx);
  return codec.decode_data(pc, doc.data, ctx);
}

}  // namespace mrdikit

#endif  // MRDIKIT_SESSION_HPP
