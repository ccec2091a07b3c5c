#pragma once

#include <limits>
#include <string>
#include <vector>

#include "cmss/pandora.hpp"

namespace cmss {

// Absorbing Markov reward process. Non-terminal rewards are paid on exit,
// terminal rewards on entry.
struct MarkovChain {
  int num_states = 0;
  std::vector<char> terminal;                   // flag per state
  std::vector<std::vector<double>> transition;  // row-stochastic; terminal rows absorbing
  std::vector<double> reward;
  int start = 0;
  std::string label;

  void validate() const;
  bool is_terminal_state(int s) const { return terminal[s] != 0; }
};

struct JmsInstance {
  std::vector<MarkovChain> chains;
  int capacity = 1;

  void validate() const;
  int total_states() const;
  // offset of chain i's states in the concatenated state vector
  std::vector<int> state_offsets() const;
};

// A state is free-lunch when it has positive reward and no direct transition
// to a terminal state. Collapsing eliminates those states while preserving
// expected rewards.
bool is_nfl(const MarkovChain& chain);

struct CollapseResult {
  MarkovChain chain;           // NFL chain over the surviving states
  std::vector<int> state_map;  // original state -> new index, -1 if eliminated
  // When the start state itself is eliminated, the play begins with a free
  // prefix: a deterministic expected reward plus a random landing state.
  double prefix_reward = 0.0;
  std::vector<double> start_dist;  // over new states; point mass at chain.start otherwise
  std::vector<int> collapsed_states;  // original indices, in elimination order
};

CollapseResult collapse(const MarkovChain& chain);

// Gittins index of a non-terminal state of an NFL chain: the smallest sigma
// such that playing the sigma-shifted chain from `state` (stopping allowed
// anytime) has optimal value zero. Computed by bisection; each probe solves
// the single-chain optimal stopping problem by value iteration.
double gittins_index(const MarkovChain& nfl_chain, int state, double tol = 1e-9);

// Optimal value of the single-chain stopping problem with terminal rewards
// shifted down by sigma (the bisection objective; exposed for tests).
double single_chain_stop_value(const MarkovChain& chain, int state, double sigma);

struct IndexTable {
  // sigma[chain][state]; +inf for collapsed states, NaN on terminal states
  std::vector<std::vector<double>> sigma;
  std::vector<CollapseResult> collapsed;

  double at(int chain, int state) const { return sigma[chain][state]; }
  static constexpr double infinity() { return std::numeric_limits<double>::infinity(); }
};

IndexTable index_table(const JmsInstance& inst);

// Index table for the same instance with rewards replaced by `rewards`
// (concatenated state order). Used by the dual-adjusted solvers.
IndexTable index_table_with_rewards(const JmsInstance& inst, const std::vector<double>& rewards);

JmsInstance with_rewards(const JmsInstance& inst, const std::vector<double>& rewards);

// Pandora's box embedded as a Markov chain: root (exit reward -c), one value
// state per atom (reward 0), one terminal per atom (entry reward v).
MarkovChain encode_pandora_box(const Box& box);
JmsInstance encode_pandora(const PandoraInstance& inst);

}  // namespace cmss
