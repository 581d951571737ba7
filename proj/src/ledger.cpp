#include "genlab/ledger.hpp"

#include <algorithm>

namespace genlab {

std::string to_string(LedgerProfile p) { return p == LedgerProfile::kPaperFaithful ? "paper-faithful" : "scaled"; }

LedgerProfile parse_profile(const std::string& s) {
  if (s == "paper-faithful") return LedgerProfile::kPaperFaithful;
  if (s == "scaled") return LedgerProfile::kScaled;
  throw std::invalid_argument("unknown ledger profile '" + s + "'");
}

namespace {
Rational ipow(const Rational& b, unsigned e) {
  Rational r(1);
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

Rational json_rational(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) return parse_rational(j.dump());  // shortest round-trip decimal
  throw std::invalid_argument("expected a number or 'p/q' string");
}
}  // namespace

nlohmann::json Windows::to_json() const {
  return {{"thick", {to_string(thick_lo), to_string(thick_hi)}},
          {"replace", {to_string(replace_lo), to_string(replace_hi)}},
          {"annulus", to_string(annulus)},
          {"tau_s", to_string(tau_s)},
          {"tau_c", to_string(tau_c)},
          {"conj_h", to_string(conj_h)},
          {"conj_g", to_string(conj_g)},
          {"allow_degenerate", allow_degenerate}};
}

Windows Windows::from_json(const nlohmann::json& j) { return from_json(j, Windows{}); }

Windows Windows::from_json(const nlohmann::json& j, const Windows& defaults) {
  Windows w = defaults;
  auto pair = [&](const char* key, Rational& lo, Rational& hi) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument(std::string("windows.") + key + " must be [lo, hi]");
    lo = json_rational(v[0]);
    hi = json_rational(v[1]);
    if (lo > hi) throw std::invalid_argument(std::string("windows.") + key + " is empty (lo > hi)");
  };
  auto single = [&](const char* key, Rational& out) {
    if (j.contains(key)) out = json_rational(j.at(key));
  };
  pair("thick", w.thick_lo, w.thick_hi);
  pair("replace", w.replace_lo, w.replace_hi);
  single("annulus", w.annulus);
  single("tau_s", w.tau_s);
  single("tau_c", w.tau_c);
  single("conj_h", w.conj_h);
  single("conj_g", w.conj_g);
  if (j.contains("allow_degenerate")) w.allow_degenerate = j.at("allow_degenerate").get<bool>();
  return w;
}

ConstantLedger ConstantLedger::paper_faithful(const MeasuredConstants& m, const Windows& w) {
  ConstantLedger l;
  l.profile_ = LedgerProfile::kPaperFaithful;
  l.m_ = m;
  l.windows_ = w;
  if (m.D_C <= 0) throw std::invalid_argument("D_C must be positive");
  const Rational mx = std::max({m.C0, m.D_S, m.E0, m.F0, m.K0, m.K1, m.delta, Rational(1)});
  l.K_map_ = 10000 * mx;
  l.L_map_ = Rational(10000000) * ipow(l.K_map_, 5) / m.D_C;
  l.block_length_ = floor_i64(l.K_map_ * l.L_map_) + 2;
  return l;
}

ConstantLedger ConstantLedger::scaled(const MeasuredConstants& m, const Rational& K_map, std::int64_t L_map,
                                      std::int64_t block_length, const ThresholdRule& rule, const Windows& w) {
  if (m.D_C <= 0) throw std::invalid_argument("D_C must be positive");
  if (L_map < 1 || block_length < 1) throw std::invalid_argument("L_map and block length must be positive");
  ConstantLedger l;
  l.profile_ = LedgerProfile::kScaled;
  l.m_ = m;
  l.K_map_ = K_map;
  l.L_map_ = Rational(L_map);
  l.block_length_ = block_length;
  l.rule_ = rule;
  l.windows_ = w;
  return l;
}

Rational ConstantLedger::midpoint_threshold(const Rational& K) const {
  return rule_.midpoint_coeff / m_.D_C * (ipow(K_map_, rule_.kmap_exponent) + K);
}

Rational ConstantLedger::chain_threshold(const Rational& K) const {
  return rule_.chain_coeff / m_.D_C * (ipow(K_map_, rule_.kmap_exponent) + K);
}

std::vector<NamedCheck> ConstantLedger::derived_checks() const {
  std::vector<NamedCheck> out;
  const Rational mx = std::max({m_.C0, m_.D_S, m_.E0, m_.F0, m_.K0, m_.K1, m_.delta, Rational(1)});
  out.push_back({"kmap_dominates_measured", K_map_ >= mx, "K_map=" + to_string(K_map_) + " max=" + to_string(mx)});
  const Rational chain = chain_threshold(10 * K_map_);
  out.push_back({"lmap_exceeds_chain_threshold_at_10kmap", L_map_ > chain,
                 "L_map=" + to_string(L_map_) + " threshold=" + to_string(chain)});
  const Rational need = 2 * K_map_ + 140 * m_.delta;
  out.push_back({"segment_longer_than_2kmap_plus_140delta", m_.D_C * L_map_ > need,
                 "D_C*L_map=" + to_string(m_.D_C * L_map_) + " need>" + to_string(need)});
  out.push_back({"kmap_at_least_linkage_level", K_map_ >= linkage_level(),
                 "linkage=" + to_string(linkage_level())});
  out.push_back({"windows_nonempty",
                 windows_.thick_lo <= windows_.thick_hi && windows_.replace_lo <= windows_.replace_hi, ""});
  return out;
}

nlohmann::json ConstantLedger::to_json() const {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : derived_checks()) checks.push_back({{"name", c.name}, {"holds", c.holds}, {"detail", c.detail}});
  return {{"profile", to_string(profile_)},
          {"delta", to_string(m_.delta)},
          {"C0", to_string(m_.C0)},
          {"D_C", to_string(m_.D_C)},
          {"D_S", to_string(m_.D_S)},
          {"E0", to_string(m_.E0)},
          {"F0", to_string(m_.F0)},
          {"K0", to_string(m_.K0)},
          {"K1", to_string(m_.K1)},
          {"K_map", to_string(K_map_)},
          {"L_map", to_string(L_map_)},
          {"block_length", block_length_},
          {"threshold_rule",
           {{"midpoint_coeff", to_string(rule_.midpoint_coeff)},
            {"chain_coeff", to_string(rule_.chain_coeff)},
            {"kmap_exponent", rule_.kmap_exponent}}},
          {"windows", windows_.to_json()},
          {"derived_checks", checks}};
}

Rational least_kmap(const MeasuredConstants& m) {
  Rational k = Rational(m.E0 + 8 * m.delta + 1);
  for (const Rational* c : {&m.delta, &m.C0, &m.D_S, &m.E0, &m.F0, &m.K0, &m.K1})
    if (*c > k) k = *c;
  return k;
}

}  // namespace genlab
