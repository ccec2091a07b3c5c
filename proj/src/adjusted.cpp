#include "cmss/adjusted.hpp"

#include <algorithm>
#include <stdexcept>

namespace cmss {

DualAdjustedInstance adjust_instance(const PandoraInstance& inst,
                                     const std::vector<AffineConstraint>& constraints,
                                     const std::vector<double>& lambda) {
  inst.validate();
  if (constraints.size() != lambda.size())
    throw std::invalid_argument("adjust_instance: one lambda per constraint required");
  for (const auto& c : constraints) c.validate(inst);

  DualAdjustedInstance adj;
  adj.base = inst;
  adj.constraints = constraints;
  adj.lambda = lambda;
  adj.exec.capacity = inst.capacity;
  adj.exec.boxes.resize(inst.boxes.size());

  for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
    const Box& b = inst.boxes[i];
    ExecBox& eb = adj.exec.boxes[i];
    eb.id = b.id;
    eb.orig_cost = b.cost;
    double cost = b.cost;
    for (std::size_t j = 0; j < constraints.size(); ++j)
      cost += lambda[j] * constraints[j].expected_theta_insp(inst, static_cast<int>(i));
    eb.cost = cost;

    eb.atoms.resize(b.dist.size());
    for (std::size_t a = 0; a < b.dist.size(); ++a) {
      double v = b.dist.support[a];
      for (std::size_t j = 0; j < constraints.size(); ++j)
        v -= lambda[j] * constraints[j].theta_sel[i].at(static_cast<int>(a));
      eb.atoms[a] = {v, b.dist.support[a], b.dist.probs[a], static_cast<int>(a)};
    }
    std::stable_sort(eb.atoms.begin(), eb.atoms.end(),
                     [](const ExecAtom& x, const ExecAtom& y) { return x.value < y.value; });
    eb.exec_of_orig.assign(b.dist.size(), -1);
    for (std::size_t p = 0; p < eb.atoms.size(); ++p) eb.exec_of_orig[eb.atoms[p].orig_atom] = static_cast<int>(p);
    eb.sigma = reservation_from_atoms(eb.atoms, eb.cost);
  }
  return adj;
}

DualAdjustedInstance adjust_instance(const PandoraInstance& inst, const AffineConstraint& constraint,
                                     double lambda) {
  return adjust_instance(inst, std::vector<AffineConstraint>{constraint}, std::vector<double>{lambda});
}

}  // namespace cmss
