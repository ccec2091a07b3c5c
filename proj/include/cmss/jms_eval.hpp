#pragma once

#include <cstdint>
#include <deque>
#include <functional>

#include "cmss/jms.hpp"
#include "cmss/pandora_eval.hpp"  // CapExceeded

namespace cmss {

// Supplies realized transitions on demand.
class TransitionSource {
 public:
  virtual ~TransitionSource() = default;
  virtual int next(const MarkovChain& chain, int chain_index, int state) = 0;
};

// Seeded: the t-th draw of chain i uses substream (seed, chain, draw-count).
class SeededSource final : public TransitionSource {
 public:
  explicit SeededSource(std::uint64_t seed, std::uint64_t trial = 0) : seed_(seed), trial_(trial) {}
  int next(const MarkovChain& chain, int chain_index, int state) override;

 private:
  std::uint64_t seed_, trial_;
  std::vector<std::uint64_t> count_;
};

// Scripted: plays back per-chain successor lists (tests).
class ScriptedSource final : public TransitionSource {
 public:
  explicit ScriptedSource(std::vector<std::deque<int>> steps) : steps_(std::move(steps)) {}
  int next(const MarkovChain& chain, int chain_index, int state) override;

 private:
  std::vector<std::deque<int>> steps_;
};

struct Trajectory {
  std::vector<std::vector<double>> visits;  // per chain, per state
  double reward = 0.0;
  std::vector<int> selected;  // chain indices that entered a terminal state
  std::vector<int> final_state;
};

// Greedy index policy: inspect the argmax-index chain while the max index is
// positive and capacity remains; ties go to the lowest chain index.
Trajectory run_index_policy(const JmsInstance& inst, const IndexTable& table, TransitionSource& stream);

struct VisitVector {
  std::vector<double> p;  // concatenated state order
  double bound = 0.0;     // H_p
};

// Expected-visits bound from the per-chain fundamental matrices.
double visit_bound(const JmsInstance& inst);

struct VisitOptions {
  std::size_t joint_cap = 2'000'000;
  int power_iters = 200000;
  double mass_tol = 1e-15;
};

// Exact expected visit counts of the deterministic index policy via forward
// propagation over the reachable joint-state graph.
VisitVector visit_vector_exact(const JmsInstance& inst, const IndexTable& table,
                               const VisitOptions& opt = {});

struct McVisitResult {
  VisitVector visits;
  double reward_mean = 0.0;
  double reward_stderr = 0.0;
  long long trials = 0;
};

McVisitResult visit_vector_mc(const JmsInstance& inst, const IndexTable& table, long long trials,
                              std::uint64_t seed);

// Expected reward of a policy from its visit vector (R . p).
double expected_reward(const JmsInstance& inst, const VisitVector& v);

// Exact optimal value by value iteration over reachable joint states. Test
// oracle for tiny instances.
double jms_brute_force_value(const JmsInstance& inst, const VisitOptions& opt = {});

// Optimal visit vector oracle: value plus the visit vector of an optimal
// deterministic policy for linear rewards `r` (used as a linear-maximization
// oracle over the achievable visit polytope).
std::pair<double, VisitVector> jms_optimal_visits(const JmsInstance& inst, const std::vector<double>& rewards,
                                                  const VisitOptions& opt = {});

}  // namespace cmss
