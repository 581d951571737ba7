#include "genlab/lab.hpp"

#include <stdexcept>

namespace genlab {

std::string Lab::default_phi(const std::string& group_id) {
  if (group_id == "z2z3") return "xy";
  if (group_id == "braid3") return "abaababaabab";  // x y x y^2 with x = aba, y = ab
  return "a";
}

std::unique_ptr<Lab> Lab::make(const std::string& group_id, const std::vector<std::string>& generators,
                               const std::string& phi) {
  std::unique_ptr<Lab> lab(new Lab());
  lab->id_ = group_id;
  lab->model_ = build_action_model(group_id);
  lab->gens_ = std::make_unique<GeneratingSet>(generators.empty() ? GeneratingSet::standard(*lab->model_.group)
                                                                   : GeneratingSet::parse(*lab->model_.group, generators));
  lab->metric_ = std::make_unique<WordMetric>(*lab->gens_);
  lab->phi_ = lab->parse(phi.empty() ? default_phi(group_id) : phi);
  if (lab->phi_translation() <= 0)
    throw std::invalid_argument("phi '" + (phi.empty() ? default_phi(group_id) : phi) +
                                "' is not loxodromic on the tree");
  return lab;
}

NormalForm Lab::random_element(std::mt19937_64& rng, std::int64_t length) const {
  const int letters = 2 * static_cast<int>(group().alphabet().rank());
  std::uniform_int_distribution<int> pick(0, letters - 1);
  Word w;
  while (static_cast<std::int64_t>(w.size()) < length) {
    const Letter l = letter_from_rank(pick(rng));
    if (!w.empty() && w.back() == -l) continue;
    w.push_back(l);
  }
  return group().normalize(w);
}

}  // namespace genlab
