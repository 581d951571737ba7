#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "genlab/space.hpp"
#include "genlab/word_metric.hpp"

namespace genlab {

// A group with its generating set, word metric, tree action and a chosen loxodromic element phi.
class Lab {
 public:
  // Empty generator list selects the standard generators; empty phi selects default_phi(group_id).
  static std::unique_ptr<Lab> make(const std::string& group_id, const std::vector<std::string>& generators = {},
                                   const std::string& phi = "");
  static std::string default_phi(const std::string& group_id);

  const std::string& id() const { return id_; }
  const GroupModel& group() const { return *model_.group; }
  const MetricSpace& space() const { return *model_.space; }
  const GroupAction& action() const { return *model_.action; }
  const GeneratingSet& gens() const { return *gens_; }
  const WordMetric& metric() const { return *metric_; }
  const NormalForm& phi() const { return phi_; }
  Rational phi_translation() const { return action().tree_translation_length(phi_); }

  NormalForm parse(const std::string& word) const { return group().normalize(group().alphabet().parse(word)); }
  // Product of `length` uniformly chosen letters, no letter followed by its inverse.
  NormalForm random_element(std::mt19937_64& rng, std::int64_t length) const;

 private:
  Lab() = default;
  std::string id_;
  ActionModel model_;
  std::unique_ptr<GeneratingSet> gens_;
  std::unique_ptr<WordMetric> metric_;
  NormalForm phi_;
};

}  // namespace genlab
