// Copyright 2026 The pairnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Architecture search spaces: feature definitions, presets, sampling,
// validation, matrix encoding, exact cardinality and feature fixing.
//
// An Architecture stores domain indices, one vector per feature in
// declaration order. Global features hold exactly one index; per-layer
// features hold one index per active layer of their stack. The active depth of
// a stack is the value of the feature that controls it, or the stack's maximum
// when no such feature exists.

#ifndef PAIRNAS_SPACE_HPP_
#define PAIRNAS_SPACE_HPP_

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "pairnas/error.hpp"
#include "pairnas/random.hpp"

namespace pairnas {

using BigInt = boost::multiprecision::cpp_int;
using Value = std::variant<std::int64_t, std::string>;

enum class Scope { Global, PerEncoderLayer, PerDecoderLayer };
enum class Kind { Ordinal, Categorical };
// Marks the global feature whose value is the layer count of a stack.
enum class DepthRole { None, Encoder, Decoder };

inline std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

struct FeatureDef {
  std::string name;
  Scope scope = Scope::Global;
  Kind kind = Kind::Ordinal;
  std::vector<Value> domain;
  DepthRole controls = DepthRole::None;

  bool per_layer() const { return scope != Scope::Global; }

  std::optional<std::size_t> index_of(const Value& v) const {
    auto it = std::find(domain.begin(), domain.end(), v);
    if (it == domain.end()) return std::nullopt;
    return static_cast<std::size_t>(it - domain.begin());
  }
};

/// Key of a fixed-value entry. `layer` empty means "every layer" for per-layer
/// features and is the only legal form for global features.
struct FixedKey {
  std::string name;
  std::optional<std::size_t> layer;
  auto operator<=>(const FixedKey&) const = default;
};

struct FeatureSelector {
  std::string name;
  std::optional<std::size_t> layer;
};

struct SearchSpace {
  std::vector<FeatureDef> features;
  std::size_t max_encoder_layers = 0;
  std::size_t max_decoder_layers = 0;
  std::map<FixedKey, Value> fixed;

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
      if (features[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    auto f = find(name);
    if (!f) throw Error(Errc::UnknownFeature, std::string(name));
    return *f;
  }

  /// Encoding width N.
  std::size_t width() const {
    return std::max<std::size_t>(1, std::max(max_encoder_layers, max_decoder_layers));
  }

  std::size_t max_layers(Scope scope) const {
    switch (scope) {
      case Scope::PerEncoderLayer: return max_encoder_layers;
      case Scope::PerDecoderLayer: return max_decoder_layers;
      case Scope::Global: return 1;
    }
    return 1;
  }

  std::optional<std::size_t> depth_feature(Scope scope) const {
    const DepthRole role = scope == Scope::PerEncoderLayer ? DepthRole::Encoder
                           : scope == Scope::PerDecoderLayer ? DepthRole::Decoder
                                                             : DepthRole::None;
    if (role == DepthRole::None) return std::nullopt;
    for (std::size_t i = 0; i < features.size(); ++i)
      if (features[i].controls == role) return i;
    return std::nullopt;
  }

  /// Domain index pinned for feature `f` at `layer`, if any. Layer-specific
  /// entries take precedence over feature-wide ones.
  std::optional<std::size_t> fixed_index(std::size_t f, std::size_t layer = 0) const {
    if (fixed.empty()) return std::nullopt;
    const FeatureDef& def = features[f];
    if (def.per_layer()) {
      if (auto it = fixed.find(FixedKey{def.name, layer}); it != fixed.end())
        return def.index_of(it->second);
    }
    if (auto it = fixed.find(FixedKey{def.name, std::nullopt}); it != fixed.end())
      return def.index_of(it->second);
    return std::nullopt;
  }

  bool is_fixed(std::size_t f, std::size_t layer = 0) const {
    return fixed_index(f, layer).has_value();
  }

  /// Number of values feature `f` may take at `layer`.
  std::size_t free_count(std::size_t f, std::size_t layer = 0) const {
    return is_fixed(f, layer) ? 1 : features[f].domain.size();
  }
};

struct Architecture {
  std::vector<std::vector<std::size_t>> choice;
  auto operator<=>(const Architecture&) const = default;
};

struct EncodedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  auto operator<=>(const EncodedMatrix&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

inline std::optional<Error> validate_space(const SearchSpace& space) {
  std::set<std::string> names;
  bool enc_depth = false, dec_depth = false;
  for (const FeatureDef& f : space.features) {
    if (!names.insert(f.name).second)
      return Error(Errc::DuplicateFeature, f.name);
    if (f.domain.empty()) return Error(Errc::EmptyDomain, f.name);
    for (std::size_t i = 0; i < f.domain.size(); ++i)
      for (std::size_t j = i + 1; j < f.domain.size(); ++j)
        if (f.domain[i] == f.domain[j]) return Error(Errc::DuplicateValue, f.name);
    if (f.kind == Kind::Ordinal) {
      for (std::size_t i = 0; i < f.domain.size(); ++i) {
        const auto* v = std::get_if<std::int64_t>(&f.domain[i]);
        if (v == nullptr || *v <= 0) return Error(Errc::NonPositiveOrdinal, f.name);
        if (i > 0 && *v <= std::get<std::int64_t>(f.domain[i - 1]))
          return Error(Errc::NonIncreasingDomain, f.name);
      }
    }
    if (f.controls != DepthRole::None) {
      bool& seen = f.controls == DepthRole::Encoder ? enc_depth : dec_depth;
      const std::size_t max = f.controls == DepthRole::Encoder ? space.max_encoder_layers
                                                               : space.max_decoder_layers;
      if (seen || f.per_layer() || f.kind != Kind::Ordinal)
        return Error(Errc::DepthOutOfRange, f.name + " cannot control depth");
      seen = true;
      for (const Value& v : f.domain) {
        const auto n = std::get<std::int64_t>(v);
        if (n < 1 || static_cast<std::size_t>(n) > max)
          return Error(Errc::DepthOutOfRange, f.name + " value " + to_string(v));
      }
    }
  }
  for (const auto& [key, value] : space.fixed) {
    auto f = space.find(key.name);
    if (!f) return Error(Errc::UnknownFeature, key.name);
    const FeatureDef& def = space.features[*f];
    if (key.layer && (!def.per_layer() || *key.layer >= space.max_layers(def.scope)))
      return Error(Errc::UnknownFeature, key.name + "@" + std::to_string(*key.layer));
    if (!def.index_of(value))
      return Error(Errc::FixedValueOutOfDomain, key.name + "=" + to_string(value));
  }
  return std::nullopt;
}

inline void ensure_valid(const SearchSpace& space) {
  if (auto err = validate_space(space)) throw *err;
}

// ---------------------------------------------------------------------------
// Depth and value access

/// Active layer count of the stack that `scope` refers to.
inline std::size_t active_depth(const SearchSpace& space, const Architecture& arch,
                                Scope scope) {
  if (scope == Scope::Global) return 1;
  if (auto d = space.depth_feature(scope)) {
    const FeatureDef& def = space.features[*d];
    return static_cast<std::size_t>(std::get<std::int64_t>(def.domain[arch.choice[*d].at(0)]));
  }
  return space.max_layers(scope);
}

inline const Value& value_of(const SearchSpace& space, const Architecture& arch,
                             std::size_t feature, std::size_t layer = 0) {
  return space.features[feature].domain[arch.choice[feature].at(layer)];
}

inline std::optional<Error> check_architecture(const SearchSpace& space,
                                               const Architecture& arch) {
  if (arch.choice.size() != space.features.size())
    return Error(Errc::IncompleteAssignment, "feature count mismatch");
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    const FeatureDef& def = space.features[f];
    const auto& c = arch.choice[f];
    if (!def.per_layer() && c.size() != 1)
      return Error(Errc::IncompleteAssignment, def.name);
    for (const std::size_t idx : c)
      if (idx >= def.domain.size()) return Error(Errc::InvalidArchitecture, def.name);
  }
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    const FeatureDef& def = space.features[f];
    const auto& c = arch.choice[f];
    if (def.per_layer() && c.size() != active_depth(space, arch, def.scope))
      return Error(Errc::IncompleteAssignment, def.name + " layer count");
    for (std::size_t l = 0; l < c.size(); ++l) {
      auto pinned = space.fixed_index(f, l);
      if (pinned && *pinned != c[l])
        return Error(Errc::InvalidArchitecture, def.name + " violates fixed value");
    }
  }
  return std::nullopt;
}

inline bool is_valid(const SearchSpace& space, const Architecture& arch) {
  return !check_architecture(space, arch).has_value();
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

inline std::size_t draw(const SearchSpace& space, std::size_t f, std::size_t layer, Rng& rng) {
  if (auto pinned = space.fixed_index(f, layer)) return *pinned;
  return uniform_index(rng, space.features[f].domain.size());
}

}  // namespace detail

/// Draws every free value independently and uniformly. Depth features are
/// drawn first (encoder, then decoder), then the remaining features in
/// declaration order with per-layer features drawn for active layers only.
inline Architecture sample_uniform(const SearchSpace& space, Rng& rng) {
  Architecture arch;
  arch.choice.resize(space.features.size());
  for (Scope s : {Scope::PerEncoderLayer, Scope::PerDecoderLayer})
    if (auto d = space.depth_feature(s)) arch.choice[*d] = {detail::draw(space, *d, 0, rng)};
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    const FeatureDef& def = space.features[f];
    if (def.controls != DepthRole::None) continue;
    if (!def.per_layer()) {
      arch.choice[f] = {detail::draw(space, f, 0, rng)};
      continue;
    }
    const std::size_t depth = active_depth(space, arch, def.scope);
    arch.choice[f].resize(depth);
    for (std::size_t l = 0; l < depth; ++l) arch.choice[f][l] = detail::draw(space, f, l, rng);
  }
  return arch;
}

/// Resizes per-layer assignments of `scope` to the current active depth,
/// drawing fresh values for newly activated layers.
inline void resize_layers(const SearchSpace& space, Architecture& arch, Scope scope, Rng& rng) {
  const std::size_t depth = active_depth(space, arch, scope);
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    if (space.features[f].scope != scope) continue;
    auto& c = arch.choice[f];
    const std::size_t old = c.size();
    c.resize(depth);
    for (std::size_t l = old; l < depth; ++l) c[l] = detail::draw(space, f, l, rng);
  }
}

// ---------------------------------------------------------------------------
// Encoding

inline double encode_value(const FeatureDef& def, std::size_t index) {
  if (def.kind == Kind::Categorical) return 1.0 + static_cast<double>(index);
  return static_cast<double>(std::get<std::int64_t>(def.domain[index]));
}

inline EncodedMatrix encode(const SearchSpace& space, const Architecture& arch) {
  if (arch.choice.size() != space.features.size())
    throw Error(Errc::IncompleteAssignment, "feature count mismatch");
  EncodedMatrix m;
  m.rows = space.features.size();
  m.cols = space.width();
  m.data.assign(m.rows * m.cols, 0.0);
  for (std::size_t f = 0; f < m.rows; ++f) {
    const FeatureDef& def = space.features[f];
    const auto& c = arch.choice[f];
    if (c.empty() && !def.per_layer()) throw Error(Errc::IncompleteAssignment, def.name);
    if (c.size() > m.cols) throw Error(Errc::InvalidArchitecture, def.name);
    for (std::size_t l = 0; l < c.size(); ++l) {
      if (c[l] >= def.domain.size()) throw Error(Errc::InvalidArchitecture, def.name);
      m.at(f, l) = encode_value(def, c[l]);
    }
  }
  return m;
}

/// Inverse of encode: looks every non-sentinel cell up in its domain.
inline Architecture decode(const SearchSpace& space, const EncodedMatrix& m) {
  if (m.rows != space.features.size() || m.cols != space.width())
    throw Error(Errc::ShapeMismatch, "matrix does not match space");
  Architecture arch;
  arch.choice.resize(m.rows);
  for (std::size_t f = 0; f < m.rows; ++f) {
    const FeatureDef& def = space.features[f];
    const std::size_t limit = def.per_layer() ? m.cols : 1;
    for (std::size_t l = 0; l < limit; ++l) {
      const double cell = m.at(f, l);
      if (cell == 0.0) break;
      std::optional<std::size_t> idx;
      for (std::size_t i = 0; i < def.domain.size(); ++i)
        if (encode_value(def, i) == cell) idx = i;
      if (!idx) throw Error(Errc::InvalidArchitecture, def.name + " cell not in domain");
      arch.choice[f].push_back(*idx);
    }
  }
  return arch;
}

/// Canonical text form "name=v[,v...];..." used for hashing and ordering.
inline std::string canonical_string(const SearchSpace& space, const Architecture& arch) {
  std::string out;
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    out += space.features[f].name;
    out += '=';
    const auto& c = arch.choice[f];
    for (std::size_t l = 0; l < c.size(); ++l) {
      if (l) out += ',';
      out += to_string(space.features[f].domain[c[l]]);
    }
    out += ';';
  }
  return out;
}

inline std::uint64_t arch_hash_u64(const SearchSpace& space, const Architecture& arch) {
  return fnv1a64(canonical_string(space, arch));
}

inline std::string arch_hash(const SearchSpace& space, const Architecture& arch) {
  return hex64(arch_hash_u64(space, arch));
}

// ---------------------------------------------------------------------------
// Cardinality, enumeration and fixing

namespace detail {

inline std::vector<std::size_t> depth_choices(const SearchSpace& space, Scope scope) {
  auto d = space.depth_feature(scope);
  if (!d) return {space.max_layers(scope)};
  const FeatureDef& def = space.features[*d];
  if (auto pinned = space.fixed_index(*d)) {
    return {static_cast<std::size_t>(std::get<std::int64_t>(def.domain[*pinned]))};
  }
  std::vector<std::size_t> out;
  for (const Value& v : def.domain) out.push_back(static_cast<std::size_t>(std::get<std::int64_t>(v)));
  return out;
}

}  // namespace detail

/// Exact number of distinct valid architectures, summed over depth choices.
inline BigInt cardinality(const SearchSpace& space) {
  ensure_valid(space);
  BigInt total = 0;
  for (const std::size_t enc : detail::depth_choices(space, Scope::PerEncoderLayer)) {
    for (const std::size_t dec : detail::depth_choices(space, Scope::PerDecoderLayer)) {
      BigInt term = 1;
      for (std::size_t f = 0; f < space.features.size(); ++f) {
        const FeatureDef& def = space.features[f];
        if (def.controls != DepthRole::None) continue;
        if (!def.per_layer()) {
          term *= space.free_count(f);
          continue;
        }
        const std::size_t depth = def.scope == Scope::PerEncoderLayer ? enc : dec;
        for (std::size_t l = 0; l < depth; ++l) term *= space.free_count(f, l);
      }
      total += term;
    }
  }
  return total;
}

/// Visits every valid architecture once. The visitor returns false to stop.
inline void enumerate(const SearchSpace& space,
                      const std::function<bool(const Architecture&)>& visit) {
  ensure_valid(space);
  struct Slot {
    std::size_t feature;
    std::size_t layer;
    std::vector<std::size_t> allowed;
  };
  auto allowed = [&](std::size_t f, std::size_t l) {
    if (auto pinned = space.fixed_index(f, l)) return std::vector<std::size_t>{*pinned};
    std::vector<std::size_t> all(space.features[f].domain.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  };
  const auto enc_feature = space.depth_feature(Scope::PerEncoderLayer);
  const auto dec_feature = space.depth_feature(Scope::PerDecoderLayer);
  auto depth_slots = [&](std::optional<std::size_t> f) {
    return f ? allowed(*f, 0) : std::vector<std::size_t>{0};
  };
  for (const std::size_t enc_idx : depth_slots(enc_feature)) {
    for (const std::size_t dec_idx : depth_slots(dec_feature)) {
      Architecture arch;
      arch.choice.resize(space.features.size());
      if (enc_feature) arch.choice[*enc_feature] = {enc_idx};
      if (dec_feature) arch.choice[*dec_feature] = {dec_idx};
      std::vector<Slot> slots;
      for (std::size_t f = 0; f < space.features.size(); ++f) {
        const FeatureDef& def = space.features[f];
        if (def.controls != DepthRole::None) continue;
        const std::size_t depth = active_depth(space, arch, def.scope);
        arch.choice[f].assign(depth, 0);
        for (std::size_t l = 0; l < depth; ++l) slots.push_back({f, l, allowed(f, l)});
      }
      std::vector<std::size_t> pos(slots.size(), 0);
      for (std::size_t s = 0; s < slots.size(); ++s)
        arch.choice[slots[s].feature][slots[s].layer] = slots[s].allowed[0];
      while (true) {
        if (!visit(arch)) return;
        std::size_t s = 0;
        for (; s < slots.size(); ++s) {
          if (++pos[s] < slots[s].allowed.size()) {
            arch.choice[slots[s].feature][slots[s].layer] = slots[s].allowed[pos[s]];
            break;
          }
          pos[s] = 0;
          arch.choice[slots[s].feature][slots[s].layer] = slots[s].allowed[0];
        }
        if (s == slots.size()) break;
      }
    }
  }
}

/// Returns a copy of `space` with the selected feature pinned to `value`.
/// Pinning a per-layer feature without a layer pins every layer and replaces
/// any earlier layer-specific entries for it.
inline SearchSpace fix_feature(const SearchSpace& space, const FeatureSelector& selector,
                               const Value& value) {
  auto f = space.find(selector.name);
  if (!f) throw Error(Errc::UnknownFeature, selector.name);
  const FeatureDef& def = space.features[*f];
  if (selector.layer && (!def.per_layer() || *selector.layer >= space.max_layers(def.scope)))
    throw Error(Errc::UnknownFeature,
                selector.name + "@" + std::to_string(*selector.layer));
  if (!def.index_of(value))
    throw Error(Errc::FixedValueOutOfDomain, selector.name + "=" + to_string(value));
  SearchSpace out = space;
  if (!selector.layer) {
    std::erase_if(out.fixed, [&](const auto& kv) { return kv.first.name == selector.name; });
  }
  out.fixed[FixedKey{selector.name, selector.layer}] = value;
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json value_to_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

inline Value value_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(Errc::ParseError, "value must be an integer or a string: " + j.dump());
}

inline std::string_view scope_name(Scope s) {
  switch (s) {
    case Scope::Global: return "global";
    case Scope::PerEncoderLayer: return "per_encoder_layer";
    case Scope::PerDecoderLayer: return "per_decoder_layer";
  }
  return "global";
}

inline nlohmann::json to_json(const SearchSpace& space) {
  nlohmann::json features = nlohmann::json::array();
  for (const FeatureDef& f : space.features) {
    nlohmann::json jf;
    jf["name"] = f.name;
    jf["scope"] = scope_name(f.scope);
    jf["kind"] = f.kind == Kind::Ordinal ? "ordinal" : "categorical";
    jf["domain"] = nlohmann::json::array();
    for (const Value& v : f.domain) jf["domain"].push_back(value_to_json(v));
    if (f.controls != DepthRole::None)
      jf["controls"] = f.controls == DepthRole::Encoder ? "encoder_depth" : "decoder_depth";
    features.push_back(std::move(jf));
  }
  nlohmann::json fixed = nlohmann::json::object();
  for (const auto& [key, value] : space.fixed) {
    std::string k = key.name;
    if (key.layer) k += "@" + std::to_string(*key.layer);
    fixed[k] = value_to_json(value);
  }
  return {{"features", features},
          {"max_encoder_layers", space.max_encoder_layers},
          {"max_decoder_layers", space.max_decoder_layers},
          {"fixed", fixed}};
}

inline SearchSpace space_from_json(const nlohmann::json& j) {
  try {
    SearchSpace space;
    for (const auto& jf : j.at("features")) {
      FeatureDef f;
      f.name = jf.at("name").get<std::string>();
      const std::string scope = jf.value("scope", "global");
      if (scope == "global") f.scope = Scope::Global;
      else if (scope == "per_encoder_layer") f.scope = Scope::PerEncoderLayer;
      else if (scope == "per_decoder_layer") f.scope = Scope::PerDecoderLayer;
      else throw Error(Errc::ParseError, "unknown scope " + scope);
      const std::string kind = jf.value("kind", "ordinal");
      if (kind == "ordinal") f.kind = Kind::Ordinal;
      else if (kind == "categorical") f.kind = Kind::Categorical;
      else throw Error(Errc::ParseError, "unknown kind " + kind);
      for (const auto& v : jf.at("domain")) f.domain.push_back(value_from_json(v));
      const std::string controls = jf.value("controls", "");
      if (controls == "encoder_depth") f.controls = DepthRole::Encoder;
      else if (controls == "decoder_depth") f.controls = DepthRole::Decoder;
      else if (!controls.empty()) throw Error(Errc::ParseError, "unknown controls " + controls);
      space.features.push_back(std::move(f));
    }
    space.max_encoder_layers = j.value("max_encoder_layers", std::size_t{0});
    space.max_decoder_layers = j.value("max_decoder_layers", std::size_t{0});
    if (j.contains("fixed")) {
      for (const auto& [k, v] : j.at("fixed").items()) {
        FixedKey key{k, std::nullopt};
        if (auto at = k.rfind('@'); at != std::string::npos) {
          key.name = k.substr(0, at);
          key.layer = std::stoul(k.substr(at + 1));
        }
        space.fixed[key] = value_from_json(v);
      }
    }
    return space;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

/// Architecture as a name -> value object; per-layer features map to arrays.
inline nlohmann::json to_json(const SearchSpace& space, const Architecture& arch) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    const FeatureDef& def = space.features[f];
    if (!def.per_layer()) {
      j[def.name] = value_to_json(def.domain[arch.choice[f].at(0)]);
      continue;
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const std::size_t idx : arch.choice[f]) arr.push_back(value_to_json(def.domain[idx]));
    j[def.name] = std::move(arr);
  }
  return j;
}

inline Architecture arch_from_json(const SearchSpace& space, const nlohmann::json& j) {
  Architecture arch;
  arch.choice.resize(space.features.size());
  for (std::size_t f = 0; f < space.features.size(); ++f) {
    const FeatureDef& def = space.features[f];
    if (!j.contains(def.name)) throw Error(Errc::IncompleteAssignment, def.name);
    const auto& jv = j.at(def.name);
    auto lookup = [&](const nlohmann::json& v) {
      auto idx = def.index_of(value_from_json(v));
      if (!idx) throw Error(Errc::InvalidArchitecture, def.name + "=" + v.dump());
      return *idx;
    };
    if (def.per_layer()) {
      if (!jv.is_array()) throw Error(Errc::ParseError, def.name + " must be an array");
      for (const auto& v : jv) arch.choice[f].push_back(lookup(v));
    } else {
      arch.choice[f] = {lookup(jv)};
    }
  }
  if (auto err = check_architecture(space, arch)) throw *err;
  return arch;
}

// ---------------------------------------------------------------------------
// Presets

namespace detail {

inline std::vector<Value> ints(std::initializer_list<std::int64_t> xs) {
  return {xs.begin(), xs.end()};
}

inline std::vector<Value> tokens(std::initializer_list<const char*> xs) {
  std::vector<Value> out;
  for (const char* x : xs) out.emplace_back(std::string(x));
  return out;
}

struct TransformerDomains {
  std::vector<Value> emb, ffn, heads;
};

inline SearchSpace translation_space(const TransformerDomains& d) {
  using enum Scope;
  SearchSpace s;
  s.max_encoder_layers = 6;
  s.max_decoder_layers = 6;
  const auto rpr = ints({8, 12, 16});
  const auto norm = tokens({"Pre-LN", "Post-LN"});
  s.features = {
      {"Enc Layer Num", Global, Kind::Ordinal, ints({6}), DepthRole::Encoder},
      {"Enc Emb Dim", Global, Kind::Ordinal, d.emb},
      {"Enc FFN Dim", PerEncoderLayer, Kind::Ordinal, d.ffn},
      {"Enc Head Num", PerEncoderLayer, Kind::Ordinal, d.heads},
      {"Enc RPR Len", PerEncoderLayer, Kind::Ordinal, rpr},
      {"Enc Norm Type", Global, Kind::Categorical, norm},
      {"Dec Layer Num", Global, Kind::Ordinal, ints({1, 2, 3, 4, 5, 6}), DepthRole::Decoder},
      {"Dec Emb Dim", Global, Kind::Ordinal, d.emb},
      {"Dec FFN Dim", PerDecoderLayer, Kind::Ordinal, d.ffn},
      {"Dec Head Num", PerDecoderLayer, Kind::Ordinal, d.heads},
      {"Dec RPR Len", PerDecoderLayer, Kind::Ordinal, rpr},
      {"Dec Norm Type", Global, Kind::Categorical, norm},
      {"Enc-Dec Attn", PerDecoderLayer, Kind::Ordinal, ints({1, 2, 3})},
  };
  return s;
}

}  // namespace detail

/// High-accuracy space for IWSLT'14 De-En.
inline SearchSpace preset_iwslt_high_acc() {
  return detail::translation_space({detail::ints({512, 640, 768}),
                                    detail::ints({768, 1024, 1536, 2048}),
                                    detail::ints({2, 4, 8})});
}

/// High-accuracy space for WMT'14 En-De.
inline SearchSpace preset_wmt_high_acc() {
  return detail::translation_space({detail::ints({640, 768, 1024}),
                                    detail::ints({2048, 3072, 4096, 5120}),
                                    detail::ints({4, 8, 16})});
}

/// Decoder-only language-model space.
inline SearchSpace preset_lm() {
  using enum Scope;
  SearchSpace s;
  s.max_encoder_layers = 0;
  s.max_decoder_layers = 14;
  s.features = {
      {"Dec Layer Num", Global, Kind::Ordinal, detail::ints({10, 12, 14}), DepthRole::Decoder},
      {"Dec Emb Dim", Global, Kind::Ordinal, detail::ints({768, 1024})},
      {"Dec FFN Dim", PerDecoderLayer, Kind::Ordinal, detail::ints({3072, 4096, 5120})},
      {"Dec Head Num", PerDecoderLayer, Kind::Ordinal, detail::ints({8, 12, 16})},
  };
  return s;
}

/// Six-feature decoder-only space with 2,736 architectures, small enough to
/// enumerate exhaustively.
inline SearchSpace preset_synthetic_small() {
  using enum Scope;
  SearchSpace s;
  s.max_encoder_layers = 0;
  s.max_decoder_layers = 2;
  s.features = {
      {"Dec Layer Num", Global, Kind::Ordinal, detail::ints({1, 2}), DepthRole::Decoder},
      {"Dec Emb Dim", Global, Kind::Ordinal, detail::ints({256, 384, 512, 640})},
      {"Dec FFN Dim", PerDecoderLayer, Kind::Ordinal, detail::ints({512, 1024, 2048})},
      {"Dec Head Num", PerDecoderLayer, Kind::Ordinal, detail::ints({4, 8})},
      {"Dec RPR Len", PerDecoderLayer, Kind::Ordinal, detail::ints({8, 12, 16})},
      {"Dec Norm Type", Global, Kind::Categorical, detail::tokens({"Pre-LN", "Post-LN"})},
  };
  return s;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"iwslt-high-acc", "wmt-high-acc", "lm",
                                                 "synthetic-small"};
  return names;
}

inline SearchSpace preset_by_name(std::string_view name) {
  if (name == "iwslt-high-acc") return preset_iwslt_high_acc();
  if (name == "wmt-high-acc") return preset_wmt_high_acc();
  if (name == "lm") return preset_lm();
  if (name == "synthetic-small") return preset_synthetic_small();
  throw Error(Errc::InvalidArgument, "unknown preset '" + std::string(name) + "'");
}

}  // namespace pairnas

#endif  // PAIRNAS_SPACE_HPP_
