#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "genlab/rational.hpp"

namespace genlab {

enum class LedgerProfile { kPaperFaithful, kScaled };

std::string to_string(LedgerProfile p);
LedgerProfile parse_profile(const std::string& s);

// Fractions of the word norm used by the counting arguments.
struct Windows {
  Rational thick_lo{1, 4}, thick_hi{3, 10};        // d_S(id, gamma) window for A_thick
  Rational replace_lo{27, 100}, replace_hi{28, 100};  // replacement index window
  Rational annulus{99, 100};                       // domain is B(n) minus B(annulus * n)
  Rational tau_s{35, 100};                         // tau_S <= tau_s * R
  Rational tau_c{10};                              // tau_C <= tau_c
  Rational conj_h{31, 100}, conj_g{57, 100};       // h^-1 g' h decomposition radii
  bool allow_degenerate = false;

  nlohmann::json to_json() const;
  static Windows from_json(const nlohmann::json& j);
  static Windows from_json(const nlohmann::json& j, const Windows& defaults);
};

// Coefficients of the segment-length thresholds (c / D_C)(K_map^e + K).
struct ThresholdRule {
  Rational midpoint_coeff{2000000};  // single segment
  Rational chain_coeff{3000000};     // chains, distance sums, quadratic length
  unsigned kmap_exponent = 5;
};

struct MeasuredConstants {
  Rational delta{0}, C0{0}, D_C{1}, D_S{1}, E0{0}, F0{0}, K0{0}, K1{0};
};

struct NamedCheck {
  std::string name;
  bool holds = false;
  std::string detail;
};

// Least K_map dominating every measured constant and the linkage level E0 + 8 delta + 1.
Rational least_kmap(const MeasuredConstants& m);

class ConstantLedger {
 public:
  static ConstantLedger paper_faithful(const MeasuredConstants& m, const Windows& w = {});
  // K_map and L_map user-set; block_length stands in for K_map L_map + 2.
  static ConstantLedger scaled(const MeasuredConstants& m, const Rational& K_map, std::int64_t L_map,
                               std::int64_t block_length, const ThresholdRule& rule, const Windows& w = {});

  LedgerProfile profile() const { return profile_; }
  const MeasuredConstants& measured() const { return m_; }
  const Rational& delta() const { return m_.delta; }
  const Rational& D_C() const { return m_.D_C; }
  const Rational& K_map() const { return K_map_; }
  const Rational& L_map() const { return L_map_; }
  std::int64_t segment_length() const { return floor_i64(L_map_); }
  std::int64_t block_length() const { return block_length_; }
  std::int64_t ind2_gap() const { return 2 * (block_length_ - 2) + 3; }  // i < j - gap
  const ThresholdRule& rule() const { return rule_; }
  const Windows& windows() const { return windows_; }
  void set_windows(const Windows& w) { windows_ = w; }

  Rational midpoint_threshold(const Rational& K) const;
  Rational chain_threshold(const Rational& K) const;
  // Alignment level of the linkage letters, E0 + 8 delta; integer metrics make "< level + 1" the same as
  // "<= level".
  Rational linkage_level() const { return m_.E0 + 8 * m_.delta + 1; }
  std::vector<NamedCheck> derived_checks() const;
  nlohmann::json to_json() const;

 private:
  LedgerProfile profile_ = LedgerProfile::kScaled;
  MeasuredConstants m_;
  Rational K_map_{1}, L_map_{1};
  std::int64_t block_length_ = 1;
  ThresholdRule rule_;
  Windows windows_;
};

}  // namespace genlab
