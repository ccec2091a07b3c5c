#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "cmss/pandora_eval.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cmss;
using namespace cmss::testing;

namespace {

double inf() { return std::numeric_limits<double>::infinity(); }

// slow scan oracle for the reservation equation on a sigma grid
double reservation_by_scan(const ValueDistribution& d, double cost) {
  double lo = d.min_value() - cost - 10.0, hi = d.max_value();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (d.expected_excess(mid) > cost)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Realization all_atoms(const PandoraInstance& inst, int atom) {
  Realization r;
  for (const auto& b : inst.boxes) r.atom.push_back(std::min<int>(atom, static_cast<int>(b.dist.size()) - 1));
  return r;
}

}  // namespace

TEST_CASE("reservation index: worked values") {
  CHECK(reservation_index(ValueDistribution({4, 10}, {0.5, 0.5}), 1.0) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(reservation_index(ValueDistribution({4, 10}, {0.5, 0.5}), -0.5) == inf());
  CHECK(reservation_index(ValueDistribution({6}, {1.0}), 2.0) == doctest::Approx(4.0).epsilon(1e-12));
  // 0.8 * (9 - sigma) = 4 on the top piece
  CHECK(reservation_index(ValueDistribution({3, 9}, {0.2, 0.8}), 4.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(reservation_index(ValueDistribution({3, 9}, {0.2, 0.8}), 4.0) ==
        doctest::Approx(reservation_by_scan(ValueDistribution({3, 9}, {0.2, 0.8}), 4.0)).epsilon(1e-8));
  // cost = 0 picks the max of the support (infimum convention)
  CHECK(reservation_index(ValueDistribution({1, 5}, {0.5, 0.5}), 0.0) == 5.0);
  // cost above E[(v - min)^+] solves below the support
  CHECK(reservation_index(ValueDistribution({2}, {1.0}), 5.0) == doctest::Approx(-3.0));
}

TEST_CASE("reservation index: monotone in cost and defining equation") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const PandoraInstance inst = random_tiny_instance(rng, 1, 4, 1);
    const ValueDistribution& d = inst.boxes[0].dist;
    double prev = inf();
    const double emax = d.expected_excess(d.min_value());
    for (double c : {0.0, 0.05, 0.3, 0.7, 1.1, 2.0}) {
      const double s = reservation_index(d, c);
      CHECK(s <= prev + 1e-12);
      prev = s;
      if (c > 0.0 && c <= emax) CHECK(d.expected_excess(s) == doctest::Approx(c).epsilon(1e-10));
    }
  }
}

TEST_CASE("distribution invariants are enforced") {
  CHECK_THROWS(ValueDistribution({1.0, 1.0}, {0.5, 0.5}));
  CHECK_THROWS(ValueDistribution({1.0, 2.0}, {0.6, 0.6}));
  CHECK_THROWS(ValueDistribution({}, {}));
  CHECK_THROWS(ValueDistribution({2.0}, {-1.0}));
}

TEST_CASE("refined policy: hand-traced runs") {
  SUBCASE("Example-FS all-high realization stops after one inspection") {
    const PandoraInstance inst = example_fs();
    const SearchOutcome out = run_refined_policy(inst, TieBreakRule::lexicographic_rule(), all_atoms(inst, 1));
    CHECK(out.inspection_order == std::vector<int>{0});
    CHECK(out.selected[0]);
    CHECK(out.num_selected == 1);
    CHECK(out.net_utility == doctest::Approx(9.0));
  }
  SUBCASE("zero-cost box is inspected and selected") {
    PandoraInstance inst;
    inst.capacity = 1;
    inst.boxes = {{1, ValueDistribution::point(5.0), 0.0, ""}};
    const SearchOutcome out = run_refined_policy(inst, TieBreakRule::lexicographic_rule(), all_atoms(inst, 0));
    CHECK(out.inspected[0]);
    CHECK(out.selected[0]);
    CHECK(out.net_utility == doctest::Approx(5.0));
  }
  SUBCASE("negative-value box loses to the outside option") {
    PandoraInstance inst;
    inst.capacity = 1;
    inst.boxes = {{1, ValueDistribution::point(-2.0), 1.0, ""}};
    const SearchOutcome out = run_refined_policy(inst, TieBreakRule::lexicographic_rule(), all_atoms(inst, 0));
    CHECK_FALSE(out.inspected[0]);
    CHECK(out.num_selected == 0);
    CHECK(out.net_utility == doctest::Approx(0.0));
  }
  SUBCASE("explicit scores must cover every candidate") {
    const PandoraInstance inst = example_fs();
    const TieBreakRule rule = TieBreakRule::explicit_rule({{1, 1.0}});
    CHECK_THROWS(run_refined_policy(inst, rule, all_atoms(inst, 0)));
  }
}

TEST_CASE("exact evaluation reproduces the worked utilities") {
  const PandoraInstance inst = example_fs();
  const EvalResult r = expected_outcome_exact(inst, TieBreakRule::lexicographic_rule());
  CHECK(r.utility == doctest::Approx(7.0625).epsilon(1e-12));
  // group-Y selection probability of the unconstrained optimum
  CHECK(r.select_prob[2] + r.select_prob[3] == doctest::Approx(0.1875).epsilon(1e-12));

  PandoraInstance one;
  one.capacity = 1;
  one.boxes = {{1, ValueDistribution::point(5.0), 1.0, ""}};
  const EvalResult r1 = expected_outcome_exact(one, TieBreakRule::lexicographic_rule());
  CHECK(r1.select_prob[0] == doctest::Approx(1.0));
  CHECK(r1.inspect_prob[0] == doctest::Approx(1.0));
  CHECK(r1.utility == doctest::Approx(4.0));
}

TEST_CASE("enumeration cap errors name the product size") {
  PandoraInstance inst;
  inst.capacity = 1;
  for (int i = 0; i < 3; ++i)
    inst.boxes.push_back({i + 1, ValueDistribution({0, 1, 2, 3}, {0.25, 0.25, 0.25, 0.25}), 0.5, ""});
  EvalOptions opt;
  opt.enumeration_cap = 16;
  CHECK_THROWS_AS(expected_outcome_exact(inst, TieBreakRule::lexicographic_rule(), opt), CapExceeded);
}

TEST_CASE("brute force oracle: worked values") {
  CHECK(brute_force_optimal_value(example_fs()) == doctest::Approx(7.0625).epsilon(1e-12));

  PandoraInstance one;
  one.capacity = 1;
  one.boxes = {{1, ValueDistribution::point(5.0), 1.0, ""}};
  CHECK(brute_force_optimal_value(one) == doctest::Approx(4.0));

  PandoraInstance never;
  never.capacity = 1;
  never.boxes = {{1, ValueDistribution({0.0, 10.0}, {0.5, 0.5}), 6.0, ""}};
  CHECK(brute_force_optimal_value(never) == doctest::Approx(0.0));
}

TEST_CASE("policy optimality: index policy matches brute force on random tiny instances") {
  std::mt19937_64 rng(123);
  for (int rep = 0; rep < 250; ++rep) {
    const PandoraInstance inst = random_tiny_instance(rng);
    const EvalResult r = expected_outcome_exact(inst, TieBreakRule::lexicographic_rule());
    const double opt = brute_force_optimal_value(inst);
    CAPTURE(rep);
    CHECK(r.utility == doctest::Approx(opt).epsilon(1e-10));
  }
}

TEST_CASE("outcome sanity on sampled paths") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const PandoraInstance inst = random_tiny_instance(rng, 5, 3, 3);
    for (std::uint64_t t = 0; t < 40; ++t) {
      const Realization real = sample_realization(inst, 99, t);
      const SearchOutcome out = run_refined_policy(inst, TieBreakRule::lexicographic_rule(), real);
      int nsel = 0;
      for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
        if (out.selected[i]) CHECK(out.inspected[i]);
        nsel += out.selected[i];
      }
      CHECK(nsel == out.num_selected);
      CHECK(nsel <= inst.capacity);
    }
  }
}

TEST_CASE("Monte Carlo evaluation") {
  const PandoraInstance inst = example_fs();
  SUBCASE("estimate within 3 standard errors of the exact value") {
    const EvalResult mc = expected_outcome_mc(inst, TieBreakRule::lexicographic_rule(), 200000, 42);
    CHECK(std::fabs(mc.utility - 7.0625) <= 3.0 * mc.utility_stderr);
  }
  SUBCASE("single trial reproduces one policy run") {
    const EvalResult mc = expected_outcome_mc(inst, TieBreakRule::lexicographic_rule(), 1, 7);
    const Realization real = sample_realization(inst, 7, 0);
    const SearchOutcome out = run_refined_policy(inst, TieBreakRule::lexicographic_rule(), real);
    CHECK(mc.utility == doctest::Approx(out.net_utility));
  }
  SUBCASE("same seed, same estimates") {
    const EvalResult a = expected_outcome_mc(inst, TieBreakRule::lexicographic_rule(), 5000, 11);
    const EvalResult b = expected_outcome_mc(inst, TieBreakRule::lexicographic_rule(), 5000, 11);
    CHECK(a.utility == b.utility);
    CHECK(a.select_prob == b.select_prob);
  }
  SUBCASE("consistency at 4 sigma on seeded random instances") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 5; ++rep) {
      const PandoraInstance t = random_tiny_instance(rng);
      const EvalResult exact = expected_outcome_exact(t, TieBreakRule::lexicographic_rule());
      const EvalResult mc = expected_outcome_mc(t, TieBreakRule::lexicographic_rule(), 100000, 1234 + rep);
      CHECK(std::fabs(mc.utility - exact.utility) <= 4.0 * mc.utility_stderr + 1e-9);
    }
  }
}
