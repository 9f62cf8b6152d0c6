// JSON (de)serialization. Outgoing numbers are decimal strings (17
// significant digits, locale-proof); incoming numbers may be strings or raw
// JSON numbers.
#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rauzy/bigmat.hpp"
#include "rauzy/combinatorics.hpp"
#include "rauzy/induction.hpp"
#include "rauzy/maps.hpp"

namespace rauzy::jsonio {

using nlohmann::json;

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double num(const json& j) {
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad numeric string: " + s);
    return v;
  }
  if (j.is_number()) return j.get<double>();
  throw std::invalid_argument("expected a number or numeric string");
}

inline json pair_to_json(const CombinatorialPair& p) {
  return json{{"alphabet", p.alphabet.symbols}, {"pi0", p.pi0}, {"pi1", p.pi1}};
}

inline CombinatorialPair pair_from_json(const json& j) {
  CombinatorialPair p;
  p.alphabet = Alphabet(j.at("alphabet").get<std::vector<std::string>>());
  p.pi0 = j.at("pi0").get<std::vector<int>>();
  p.pi1 = j.at("pi1").get<std::vector<int>>();
  auto v = validate_pair(p);
  if (!v.ok()) throw std::invalid_argument("invalid combinatorial pair: " + v.reason);
  return p;
}

inline json spec_to_json(const BranchSpec& s) {
  switch (s.kind) {
    case BranchKind::affine:
      return json{{"kind", "affine"}};
    case BranchKind::moebius:
      return json{{"kind", "moebius"}, {"m", fmt(s.m)}};
    case BranchKind::power_kink:
      return json{{"kind", "power_kink"},
                  {"center", fmt(s.center)},
                  {"beta", fmt(s.beta)},
                  {"amplitude", fmt(s.amplitude)}};
  }
  throw std::logic_error("unreachable");
}

inline BranchSpec spec_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "affine") return BranchSpec::affine();
  if (kind == "moebius") return BranchSpec::moebius(num(j.at("m")));
  if (kind == "power_kink")
    return BranchSpec::power_kink(num(j.at("center")), num(j.at("beta")),
                                  num(j.at("amplitude")));
  throw std::invalid_argument("unknown branch kind: " + kind);
}

template <class R>
json map_to_json(const Giem<R>& f) {
  json j;
  j["pair"] = pair_to_json(f.pair);
  json lens = json::array();
  for (R l : f.lengths) lens.push_back(fmt(to_double(l)));
  j["lengths"] = lens;
  json branches = json::array();
  for (const BranchSpec& s : f.specs) branches.push_back(spec_to_json(s));
  j["branches"] = branches;
  bool affine_slopes = false;
  for (Letter l = 0; l < f.d(); ++l)
    if (std::abs(to_double(f.img_lengths[l]) - to_double(f.lengths[l])) > 1e-15)
      affine_slopes = true;
  if (affine_slopes) {
    json slopes = json::array();
    for (Letter l = 0; l < f.d(); ++l)
      slopes.push_back(fmt(std::log(to_double(f.img_lengths[l]) / to_double(f.lengths[l]))));
    j["log_slopes"] = slopes;
  }
  return j;
}

template <class R>
Giem<R> map_from_json(const json& j) {
  CombinatorialPair pair = pair_from_json(j.at("pair"));
  std::vector<R> lengths;
  for (const auto& l : j.at("lengths")) lengths.push_back(R(num(l)));
  std::vector<BranchSpec> specs;
  if (j.contains("branches"))
    for (const auto& b : j.at("branches")) specs.push_back(spec_from_json(b));
  else
    specs.assign(pair.d(), BranchSpec::affine());
  if (static_cast<int>(specs.size()) != pair.d())
    throw std::invalid_argument("branch count must match alphabet size");

  if (j.contains("log_slopes")) {
    for (const BranchSpec& s : specs)
      if (s.kind != BranchKind::affine)
        throw std::invalid_argument("log_slopes only apply to affine branches");
    std::vector<R> slopes;
    for (const auto& s : j.at("log_slopes")) slopes.push_back(R(num(s)));
    return make_affine_iem(pair, lengths, slopes);
  }
  bool all_affine = true;
  for (const BranchSpec& s : specs)
    if (s.kind != BranchKind::affine) all_affine = false;
  if (all_affine) return make_standard_iem(pair, lengths);
  return make_giem(pair, lengths, specs);
}

inline json bigint_to_json(const BigInt& v) { return v.str(); }

inline json bigmat_to_json(const BigMat& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int j = 0; j < m.n; ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return rows;
}

template <class R>
json state_to_json(const InductionState<R>& s) {
  json j;
  j["level"] = s.level;
  j["domain_length"] = fmt(to_double(s.domain_len));
  j["pair"] = pair_to_json(s.pair);
  json lens = json::array(), imgs = json::array(), qs = json::array(), words = json::array();
  for (int l = 0; l < s.pair.d(); ++l) {
    lens.push_back(fmt(to_double(s.lengths[l])));
    imgs.push_back(fmt(to_double(s.img_lengths[l])));
    qs.push_back(s.times[l].str());
    words.push_back(s.words[l]);
  }
  j["lengths"] = lens;
  j["image_lengths"] = imgs;
  j["return_times"] = qs;
  j["return_words"] = words;
  return j;
}

inline json step_to_json(const RauzyStep& st) {
  return json{{"eps", st.eps}, {"winner", st.winner}, {"loser", st.loser}};
}

}  // namespace rauzy::jsonio
