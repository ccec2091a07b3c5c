#include "cmss/jms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace cmss {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void MarkovChain::validate() const {
  if (num_states <= 0) throw std::invalid_argument("chain: empty state space");
  if (static_cast<int>(terminal.size()) != num_states || static_cast<int>(reward.size()) != num_states ||
      static_cast<int>(transition.size()) != num_states)
    throw std::invalid_argument("chain: field sizes disagree");
  if (start < 0 || start >= num_states) throw std::invalid_argument("chain: bad start state");
  if (terminal[start]) throw std::invalid_argument("chain: start state cannot be terminal");
  bool any_terminal = false;
  for (int s = 0; s < num_states; ++s) {
    if (static_cast<int>(transition[s].size()) != num_states)
      throw std::invalid_argument("chain: transition row size");
    double row = 0.0;
    for (int t = 0; t < num_states; ++t) {
      if (transition[s][t] < -1e-12) throw std::invalid_argument("chain: negative transition probability");
      row += transition[s][t];
    }
    if (terminal[s]) {
      any_terminal = true;
      for (int t = 0; t < num_states; ++t)
        if (transition[s][t] != (t == s ? 1.0 : 0.0))
          throw std::invalid_argument("chain: terminal rows must be absorbing");
    } else if (std::fabs(row - 1.0) > 1e-12) {
      throw std::invalid_argument("chain: row does not sum to 1");
    }
  }
  if (!any_terminal) throw std::invalid_argument("chain: no terminal state");
  // every non-terminal state must reach some terminal state
  std::vector<char> reaches(num_states, 0);
  std::deque<int> queue;
  for (int s = 0; s < num_states; ++s)
    if (terminal[s]) {
      reaches[s] = 1;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    const int t = queue.front();
    queue.pop_front();
    for (int s = 0; s < num_states; ++s)
      if (!reaches[s] && transition[s][t] > 0.0) {
        reaches[s] = 1;
        queue.push_back(s);
      }
  }
  for (int s = 0; s < num_states; ++s)
    if (!reaches[s]) throw std::invalid_argument("chain: state cannot reach a terminal state");
}

void JmsInstance::validate() const {
  if (chains.empty()) throw std::invalid_argument("jms: no chains");
  if (capacity < 1 || capacity > static_cast<int>(chains.size()))
    throw std::invalid_argument("jms: capacity out of range");
  for (const auto& c : chains) c.validate();
}

int JmsInstance::total_states() const {
  int d = 0;
  for (const auto& c : chains) d += c.num_states;
  return d;
}

std::vector<int> JmsInstance::state_offsets() const {
  std::vector<int> off;
  int d = 0;
  for (const auto& c : chains) {
    off.push_back(d);
    d += c.num_states;
  }
  return off;
}

bool is_nfl(const MarkovChain& chain) {
  for (int s = 0; s < chain.num_states; ++s) {
    if (chain.terminal[s] || chain.reward[s] <= 0.0) continue;
    bool exits = false;
    for (int t = 0; t < chain.num_states && !exits; ++t)
      if (chain.terminal[t] && chain.transition[s][t] > 0.0) exits = true;
    if (!exits) return false;
  }
  return true;
}

CollapseResult collapse(const MarkovChain& input) {
  input.validate();
  const int n = input.num_states;

  // Work on a copy extended with a virtual root that feeds the start state.
  // The root soaks up rewards and transition mass exactly like any other
  // parent, which handles a collapsed start state for free.
  std::vector<std::vector<double>> A = input.transition;
  std::vector<double> R = input.reward;
  std::vector<double> root_row(n, 0.0);
  root_row[input.start] = 1.0;
  double root_reward = 0.0;
  std::vector<char> alive(n, 1);

  CollapseResult out;

  auto is_fl = [&](int s) {
    if (input.terminal[s] || R[s] <= 0.0) return false;
    for (int t = 0; t < n; ++t)
      if (alive[t] && input.terminal[t] && A[s][t] > 0.0) return false;
    return true;
  };

  while (true) {
    int fl = -1;
    for (int s = 0; s < n && fl < 0; ++s)
      if (alive[s] && is_fl(s)) fl = s;
    if (fl < 0) break;

    const double self = A[fl][fl];
    const double escape = 1.0 - self;
    if (escape <= 1e-14) throw std::invalid_argument("collapse: free-lunch state with no escape");

    auto eliminate_into = [&](std::vector<double>& row, double& rew) {
      const double w = row[fl];
      if (w <= 0.0) return;
      rew += w * R[fl] / escape;
      for (int c = 0; c < n; ++c) {
        if (c == fl || !alive[c]) continue;
        if (A[fl][c] > 0.0) row[c] += w * A[fl][c] / escape;
      }
      row[fl] = 0.0;
    };

    for (int p = 0; p < n; ++p)
      if (alive[p] && p != fl && !input.terminal[p]) eliminate_into(A[p], R[p]);
    eliminate_into(root_row, root_reward);

    alive[fl] = 0;
    out.collapsed_states.push_back(fl);
  }

  // Re-index the surviving states.
  out.state_map.assign(n, -1);
  int m = 0;
  for (int s = 0; s < n; ++s)
    if (alive[s]) out.state_map[s] = m++;
  if (m == 0) throw std::logic_error("collapse: all states eliminated");

  MarkovChain& c = out.chain;
  c.num_states = m;
  c.terminal.assign(m, 0);
  c.reward.assign(m, 0.0);
  c.transition.assign(m, std::vector<double>(m, 0.0));
  c.label = input.label;
  for (int s = 0; s < n; ++s) {
    if (!alive[s]) continue;
    const int ns = out.state_map[s];
    c.terminal[ns] = input.terminal[s];
    c.reward[ns] = R[s];
    if (input.terminal[s]) {
      c.transition[ns][ns] = 1.0;
    } else {
      for (int t = 0; t < n; ++t)
        if (alive[t]) c.transition[ns][out.state_map[t]] = A[s][t];
    }
  }

  out.prefix_reward = root_reward;
  out.start_dist.assign(m, 0.0);
  for (int s = 0; s < n; ++s)
    if (alive[s]) out.start_dist[out.state_map[s]] = root_row[s];
  if (out.state_map[input.start] >= 0) {
    c.start = out.state_map[input.start];
  } else {
    // start from the most likely landing state; callers that care about the
    // full landing distribution use start_dist
    c.start = static_cast<int>(std::max_element(out.start_dist.begin(), out.start_dist.end()) -
                               out.start_dist.begin());
  }
  return out;
}

double single_chain_stop_value(const MarkovChain& chain, int state, double sigma) {
  const int n = chain.num_states;
  std::vector<double> v(n, 0.0);
  double delta = kInf;
  for (int it = 0; it < 200000 && delta > 1e-13; ++it) {
    delta = 0.0;
    for (int s = 0; s < n; ++s) {
      if (chain.terminal[s]) continue;
      double cont = chain.reward[s];
      for (int t = 0; t < n; ++t) {
        const double p = chain.transition[s][t];
        if (p <= 0.0) continue;
        cont += p * (chain.terminal[t] ? chain.reward[t] - sigma : v[t]);
      }
      const double nv = std::max(0.0, cont);
      delta = std::max(delta, std::fabs(nv - v[s]));
      v[s] = nv;
    }
  }
  if (delta > 1e-10) throw std::runtime_error("single_chain_stop_value: value iteration did not converge");
  return v[state];
}

double gittins_index(const MarkovChain& nfl_chain, int state, double tol) {
  if (nfl_chain.terminal[state]) throw std::invalid_argument("gittins_index: terminal state has no index");
  if (!is_nfl(nfl_chain)) throw std::invalid_argument("gittins_index: chain violates NFL (collapse it first)");

  double tlo = kInf, thi = -kInf, rsum = 0.0;
  for (int s = 0; s < nfl_chain.num_states; ++s) {
    if (nfl_chain.terminal[s]) {
      tlo = std::min(tlo, nfl_chain.reward[s]);
      thi = std::max(thi, nfl_chain.reward[s]);
    } else {
      rsum += std::max(0.0, nfl_chain.reward[s]);
    }
  }
  double lo = tlo - 1.0, hi = thi + rsum + 1.0;
  // W is positive below the index and zero at/above it; expand if needed
  for (int guard = 0; guard < 200 && single_chain_stop_value(nfl_chain, state, hi) > 0.0; ++guard)
    hi += std::max(1.0, hi - lo);
  for (int guard = 0; guard < 200 && single_chain_stop_value(nfl_chain, state, lo) <= 0.0; ++guard)
    lo -= std::max(1.0, hi - lo);

  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (single_chain_stop_value(nfl_chain, state, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  if (hi - lo > 10.0 * tol) throw std::runtime_error("gittins_index: bisection did not converge");
  return 0.5 * (lo + hi);
}

IndexTable index_table(const JmsInstance& inst) {
  inst.validate();
  IndexTable table;
  table.sigma.resize(inst.chains.size());
  table.collapsed.reserve(inst.chains.size());
  for (std::size_t i = 0; i < inst.chains.size(); ++i) {
    const MarkovChain& ch = inst.chains[i];
    CollapseResult col = collapse(ch);
    table.sigma[i].assign(ch.num_states, std::numeric_limits<double>::quiet_NaN());
    for (int s = 0; s < ch.num_states; ++s) {
      if (ch.terminal[s]) continue;
      const int ns = col.state_map[s];
      table.sigma[i][s] = (ns < 0) ? kInf : gittins_index(col.chain, ns);
    }
    table.collapsed.push_back(std::move(col));
  }
  return table;
}

JmsInstance with_rewards(const JmsInstance& inst, const std::vector<double>& rewards) {
  if (static_cast<int>(rewards.size()) != inst.total_states())
    throw std::invalid_argument("with_rewards: dimension mismatch");
  JmsInstance out = inst;
  const auto off = inst.state_offsets();
  for (std::size_t i = 0; i < out.chains.size(); ++i)
    for (int s = 0; s < out.chains[i].num_states; ++s) out.chains[i].reward[s] = rewards[off[i] + s];
  return out;
}

IndexTable index_table_with_rewards(const JmsInstance& inst, const std::vector<double>& rewards) {
  return index_table(with_rewards(inst, rewards));
}

MarkovChain encode_pandora_box(const Box& box) {
  const int m = static_cast<int>(box.dist.size());
  MarkovChain c;
  c.num_states = 1 + 2 * m;
  c.terminal.assign(c.num_states, 0);
  c.reward.assign(c.num_states, 0.0);
  c.transition.assign(c.num_states, std::vector<double>(c.num_states, 0.0));
  c.start = 0;
  c.label = "box" + std::to_string(box.id);
  c.reward[0] = -box.cost;
  for (int a = 0; a < m; ++a) {
    const int value_state = 1 + a;
    const int term_state = 1 + m + a;
    c.transition[0][value_state] = box.dist.probs[a];
    c.transition[value_state][term_state] = 1.0;
    c.terminal[term_state] = 1;
    c.reward[term_state] = box.dist.support[a];
    c.transition[term_state][term_state] = 1.0;
  }
  return c;
}

JmsInstance encode_pandora(const PandoraInstance& inst) {
  inst.validate();
  JmsInstance out;
  out.capacity = inst.capacity;
  for (const auto& b : inst.boxes) out.chains.push_back(encode_pandora_box(b));
  return out;
}

}  // namespace cmss
