#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cmss/distribution.hpp"

namespace cmss {

struct Box {
  int id = 0;
  ValueDistribution dist;
  double cost = 0.0;  // may be zero or negative
  std::string group;  // optional label
};

struct PandoraInstance {
  std::vector<Box> boxes;
  int capacity = 1;

  void validate() const;
  int position_of(int box_id) const;  // -1 if unknown
  std::size_t realization_space() const;  // product of support sizes (saturating)
};

// A drawn value per box, stored as an index into the box's original support.
// Atom indices survive dual adjustment (values get shifted and re-sorted,
// atoms keep their identity), which keeps policy traces comparable across
// the original and adjusted instances.
struct Realization {
  std::vector<int> atom;  // by box position

  static Realization from_values(const PandoraInstance& inst, const std::map<int, double>& values);
};

struct SearchOutcome {
  std::vector<char> inspected;      // by box position
  std::vector<char> selected;       // by box position
  std::vector<int> inspection_order;  // box positions in the order opened
  double net_utility = 0.0;         // sum of selected original values - inspected original costs
  int num_selected = 0;
};

struct TieBreakRule {
  enum class Kind { lexicographic, negative_extreme, positive_extreme, explicit_scores, perturbation };
  Kind kind = Kind::lexicographic;
  std::map<int, double> scores;            // explicit_scores: box id -> score; outside defaults to 0
  std::vector<std::vector<double>> omega;  // perturbation: one weight vector per refinement level

  static TieBreakRule lexicographic_rule() { return {}; }
  static TieBreakRule negative_extreme_rule() { return {Kind::negative_extreme, {}, {}}; }
  static TieBreakRule positive_extreme_rule() { return {Kind::positive_extreme, {}, {}}; }
  static TieBreakRule explicit_rule(std::map<int, double> s) {
    return {Kind::explicit_scores, std::move(s), {}};
  }
  static TieBreakRule perturbation_rule(std::vector<double> w) {
    return {Kind::perturbation, {}, {std::move(w)}};
  }
  static TieBreakRule perturbation_rule_nested(std::vector<std::vector<double>> ws) {
    return {Kind::perturbation, {}, std::move(ws)};
  }
  std::string name() const;
};

// Numeric knobs for policy execution. The dual adjustment creates exact ties
// analytically; tie_tol keeps float noise from hiding them.
struct ExecParams {
  double tie_tol = 1e-9;
  double zero_cost_tol = 1e-9;
};

// ---------------------------------------------------------------------------
// Execution view. One entry per box; atom values may be dual-adjusted, in
// which case they are re-sorted (duplicates allowed) and remember which
// original atom they came from.

struct ExecAtom {
  double value = 0.0;       // value the search sees (adjusted when applicable)
  double orig_value = 0.0;  // value used for utility accounting
  double prob = 0.0;
  int orig_atom = 0;
};

struct ExecBox {
  int id = 0;
  double cost = 0.0;       // cost the search sees
  double orig_cost = 0.0;  // cost used for utility accounting
  double sigma = 0.0;      // reservation index of (atoms.value, cost)
  std::vector<ExecAtom> atoms;    // ascending by .value
  std::vector<int> exec_of_orig;  // original atom index -> position in atoms

  double prob_value_greater(double t) const;
  double prob_value_greater_equal(double t) const;
};

struct ExecInstance {
  std::vector<ExecBox> boxes;
  int capacity = 1;

  static ExecInstance from_instance(const PandoraInstance& inst);
};

// Reservation index over (value, prob) atoms that may contain duplicates.
double reservation_from_atoms(const std::vector<ExecAtom>& atoms, double cost);

// Context handed to the tie-breaking rule at a single decision point of the
// refined policy (Line 7 of the search loop).
struct TieContext {
  const ExecInstance& inst;
  const std::vector<int>& candidates;     // box positions; -1 denotes the outside option
  const std::vector<char>& opened;        // by box position
  const std::vector<char>& selected;      // by box position
  const std::vector<int>& realized_atom;  // exec-order atom index for opened boxes, else -1
  const std::vector<double>& option;      // option values o_i by box position
  double o_max;                           // max option value over unselected boxes + outside
};

class TieBreaker {
 public:
  virtual ~TieBreaker() = default;
  // Returns one element of ctx.candidates.
  virtual int pick(const TieContext& ctx) const = 0;
};

// Rules that need no constraint context (lexicographic / explicit scores).
std::unique_ptr<TieBreaker> make_basic_tiebreaker(const TieBreakRule& rule);

// Runs the refined greedy index policy on an execution view.
SearchOutcome run_policy(const ExecInstance& inst, const TieBreaker& tie, const Realization& real,
                         const ExecParams& params = {});

// Convenience wrapper on the unadjusted instance; only basic rules apply.
SearchOutcome run_refined_policy(const PandoraInstance& inst, const TieBreakRule& tie,
                                 const Realization& real, const ExecParams& params = {});

}  // namespace cmss
