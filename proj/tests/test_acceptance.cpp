#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "rmmb/counterexample.hpp"
#include "rmmb/mechanism.hpp"
#include "rmmb/scenario.hpp"
#include "test_support.hpp"

// Acceptance gate. One test case per criterion A1..A10; each prints a single
// verdict line before asserting so a red run still shows the full scoreboard.
// Tolerances and runtime budgets are pinned inline next to the checks.

using namespace rmmb;

namespace {

void verdict(const char* id, bool pass, const std::string& detail) {
  std::printf("[%s] %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

SetSystem bundle_vs_single() {
  return SetSystem::explicit_family(
      3, {ElemSet::of({0, 1}), ElemSet::of({2})}, true);
}

bool rank_zero(const SetSystem& s) {
  WeightVector ones(static_cast<std::size_t>(s.ground_size()), 1.0);
  return s.greedy_max_weight(ones) == ElemSet{};
}

// The 500-system sweep is shared by A4 and A5. Attempts cycle the ground size
// so a saturated size cannot stall the dedupe loop.
const std::vector<SetSystem>& sweep_systems() {
  static const std::vector<SetSystem> systems = [] {
    std::mt19937_64 rng(777);
    std::set<std::vector<std::uint64_t>> seen;
    std::vector<SetSystem> out;
    for (int attempt = 0; attempt < 40000 && out.size() < 500; ++attempt) {
      int n = 3 + attempt % 4;
      SetSystem s = testgen::random_nonmatroid(rng, n);
      if (!seen.insert(testgen::family_signature(s)).second) continue;
      out.push_back(std::move(s));
    }
    return out;
  }();
  return systems;
}

double hull_value_at(const IronedCurve& hull, double q) {
  auto it = std::lower_bound(hull.q.begin() + 1, hull.q.end(), q);
  std::size_t k = static_cast<std::size_t>(it - hull.q.begin());
  if (k >= hull.q.size()) k = hull.q.size() - 1;
  return hull.r[k - 1] + hull.slope[k - 1] * (q - hull.q[k - 1]);
}

}  // namespace

TEST_CASE("A1 bundle market with misreporting reds, exact revenue") {
  SetSystem bundle = bundle_vs_single();
  BuiltCounterexample built = build_rmmb_counterexample(bundle, 102.0);
  double best_ms = 1e9;
  for (int rep = 0; rep < 3; ++rep) {
    Clock::time_point t0 = Clock::now();
    built = build_rmmb_counterexample(bundle, 102.0);
    best_ms = std::min(best_ms, ms_since(t0));
  }
  double err_all = std::abs(built.report.rev_all - 0.02);
  double err_green = std::abs(built.report.rev_green - 1.0);
  bool rev_ok = err_all <= 1e-12 && err_green <= 1e-12 && built.report.violated;
  bool time_ok = best_ms < 1.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "rev_all=%.17g rev_green=%.17g (tol 1e-12), %.3f ms (< 1 ms)",
                built.report.rev_all, built.report.rev_green, best_ms);
  verdict("A1", rev_ok && time_ok, buf);
  CHECK(err_all <= 1e-12);
  CHECK(err_green <= 1e-12);
  CHECK(built.report.violated);
  CHECK(best_ms < 1.0);
}

TEST_CASE("A2 single item, asymmetric uniform bidders") {
  SetSystem item = SetSystem::uniform(2, 1);
  std::vector<ValueDistribution> dists = {ValueDistribution::uniform(0.0, 4.0),
                                          ValueDistribution::uniform(0.0, 8.0)};
  AuctionOutcome low = myeropt(item, dists, {0.0, 5.0});
  AuctionOutcome high = myeropt(item, dists, {4.0, 5.0});
  bool low_ok = low.winners == ElemSet::of({1}) &&
                std::abs(low.payments[1] - 4.0) <= 1e-9;
  bool high_ok = high.winners == ElemSet::of({0}) &&
                 std::abs(high.payments[0] - 3.0) <= 1e-9;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "(0,5): bidder 1 pays %.12g; (4,5): bidder 0 pays %.12g (tol 1e-9)",
                low.payments[1], high.payments[0]);
  verdict("A2", low_ok && high_ok, buf);
  CHECK(low_ok);
  CHECK(high_ok);
}

TEST_CASE("A3 matroid markets, exact revenue monotonicity") {
  Clock::time_point t0 = Clock::now();
  std::mt19937_64 rng(903);
  int markets = 0;
  long cases = 0;
  double worst_margin = 1e300;
  bool all_exact = true;
  for (int attempt = 0; attempt < 4000 && markets < 60; ++attempt) {
    int n = 2 + attempt % 4;
    SetSystem s = testgen::random_matroid(rng, n, attempt);
    if (rank_zero(s)) continue;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    int red_count = 1 + attempt % std::min(2, n - 1);
    ElemSet reds;
    for (int r = 0; r < red_count; ++r)
      reds = reds.with(order[static_cast<std::size_t>(r)]);

    std::vector<ValueDistribution> specified;
    specified.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      specified.push_back(testgen::random_discrete_dist(rng, 3));

    // Red bid grid: the cross product of each red bidder's support atoms.
    std::vector<int> red_ids = reds.to_vector();
    std::vector<std::size_t> pick(red_ids.size(), 0);
    while (true) {
      std::vector<BidderSpec> bidders;
      bidders.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        if (reds.contains(i)) {
          std::size_t slot = static_cast<std::size_t>(
              std::find(red_ids.begin(), red_ids.end(), i) - red_ids.begin());
          double bid = specified[static_cast<std::size_t>(i)]
                           .support_values()[pick[slot]];
          bidders.push_back(BidderSpec{specified[static_cast<std::size_t>(i)],
                                       Color::Red, bid, {}});
        } else {
          bidders.push_back(BidderSpec{specified[static_cast<std::size_t>(i)],
                                       Color::Green, {}, {}});
        }
      }
      Scenario sc(s, std::move(bidders));
      RmmbReport rep = rmmb_check(sc, Mechanism::MyerOPT, 1, 1);
      all_exact = all_exact && rep.rev_all.exact && rep.rev_green.exact;
      worst_margin = std::min(worst_margin, rep.margin);
      ++cases;

      std::size_t slot = 0;
      for (; slot < pick.size(); ++slot) {
        std::size_t atoms = specified[static_cast<std::size_t>(red_ids[slot])]
                                .support_values().size();
        if (++pick[slot] < atoms) break;
        pick[slot] = 0;
      }
      if (slot == pick.size()) break;
    }
    ++markets;
  }
  double elapsed = ms_since(t0);
  bool ok = markets >= 50 && all_exact && worst_margin >= -1e-9 &&
            elapsed < 300000.0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%d matroid markets, %ld red-bid cases, worst margin %.3g "
                "(>= -1e-9), %.0f ms (< 5 min)",
                markets, cases, worst_margin, elapsed);
  verdict("A3", ok, buf);
  CHECK(markets >= 50);
  CHECK(all_exact);
  CHECK(worst_margin >= -1e-9);
  CHECK(elapsed < 300000.0);
}

TEST_CASE("A4 every sampled non-matroid yields a violated counterexample") {
  Clock::time_point t0 = Clock::now();
  const std::vector<SetSystem>& systems = sweep_systems();
  int violated = 0;
  int verified = 0;
  for (const SetSystem& s : systems) {
    BuiltCounterexample built = build_rmmb_counterexample(s);
    if (built.report.violated) ++violated;
    if (verify_rmmb_counterexample(built.report, built.scenario)) ++verified;
  }
  double elapsed = ms_since(t0);
  bool ok = systems.size() == 500 &&
            violated == static_cast<int>(systems.size()) &&
            verified == static_cast<int>(systems.size()) &&
            elapsed < 600000.0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%zu distinct non-matroids (n<=6), violated %d/%zu, "
                "replay-verified %d/%zu, %.0f ms (< 10 min)",
                systems.size(), violated, systems.size(), verified,
                systems.size(), elapsed);
  verdict("A4", ok, buf);
  CHECK(systems.size() == 500);
  CHECK(violated == static_cast<int>(systems.size()));
  CHECK(verified == static_cast<int>(systems.size()));
  CHECK(elapsed < 600000.0);
}

TEST_CASE("A5 every sampled non-matroid yields a VCG drop witness") {
  Clock::time_point t0 = Clock::now();
  const std::vector<SetSystem>& systems = sweep_systems();
  int witnessed = 0;
  double min_gap = 1e300;
  for (const SetSystem& s : systems) {
    VcgWitness w = vcg_witness(s);
    double gap = w.rev_v_minus_x - w.rev_v;
    min_gap = std::min(min_gap, gap);
    if (gap >= 1.0 - 1e-9) ++witnessed;
  }
  double elapsed = ms_since(t0);
  bool ok = systems.size() == 500 &&
            witnessed == static_cast<int>(systems.size());
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%zu systems, gap >= 1 in %d/%zu (min gap %.12g), %.0f ms",
                systems.size(), witnessed, systems.size(), min_gap, elapsed);
  verdict("A5", ok, buf);
  CHECK(systems.size() == 500);
  CHECK(witnessed == static_cast<int>(systems.size()));
}

TEST_CASE("A6 five-element non-matroid satisfies the maximal-set exchange table") {
  Clock::time_point t0 = Clock::now();
  DrsReport drs = drs_counterexample();
  bool not_matroid = !drs.system.is_matroid();
  bool row_count = drs.rows.size() == 90;

  std::set<std::tuple<std::uint64_t, std::uint64_t, int, int>> distinct;
  bool rows_valid = true;
  for (const DrsCaseRow& row : drs.rows) {
    distinct.insert({row.a.bits, row.b.bits, row.y, row.x});
    bool valid = row.b.contains(row.y) && row.a.contains(row.x) &&
                 drs.system.is_independent(row.a.without(row.x).with(row.y));
    bool matched = (row.x == row.y) == row.a.contains(row.y);
    rows_valid = rows_valid && valid && matched;
  }
  auto has_row = [&](std::initializer_list<ElementId> a,
                     std::initializer_list<ElementId> b, int y, int x) {
    return distinct.count({ElemSet::of(a).bits, ElemSet::of(b).bits, y, x}) > 0;
  };
  bool table_rows = has_row({0, 2, 4}, {1, 3, 4}, 1, 4) &&
                    has_row({0, 2, 4}, {0, 2, 3}, 3, 4) &&
                    has_row({0, 2, 4}, {1, 2, 3}, 1, 4) &&
                    has_row({0, 2, 3}, {0, 2, 4}, 4, 3) &&
                    has_row({1, 2, 3}, {0, 2, 4}, 0, 1) &&
                    has_row({1, 2, 3}, {0, 2, 4}, 4, 2);
  double elapsed = ms_since(t0);
  bool ok = not_matroid && row_count && rows_valid &&
            distinct.size() == 90 && table_rows && elapsed < 1000.0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "non-matroid, %zu/90 distinct rows all exchange-valid, 6 "
                "reference rows present, %.1f ms (< 1 s)",
                distinct.size(), elapsed);
  verdict("A6", ok, buf);
  CHECK(not_matroid);
  CHECK(row_count);
  CHECK(rows_valid);
  CHECK(distinct.size() == 90);
  CHECK(table_rows);
  CHECK(elapsed < 1000.0);
}

TEST_CASE("A7 incremental greedy matches greedy from scratch") {
  Clock::time_point t0 = Clock::now();
  std::mt19937_64 rng(1313);
  int done = 0;
  int agreed = 0;
  for (int attempt = 0; attempt < 20000 && done < 1000; ++attempt) {
    int n = 4 + attempt % 9;
    SetSystem s = testgen::random_matroid(rng, n, attempt);
    WeightVector w = testgen::random_weights(rng, n);
    int x = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    WeightVector masked = w;
    masked[static_cast<std::size_t>(x)] = 0.0;
    ElemSet base = s.greedy_max_weight(masked);
    if (s.incremental_update(base, x, w) == s.greedy_max_weight(w)) ++agreed;
    ++done;
  }
  double elapsed = ms_since(t0);
  bool ok = done == 1000 && agreed == done;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d weighted matroids (n in 4..12), identical sets %d/%d, %.0f ms",
                done, agreed, done, elapsed);
  verdict("A7", ok, buf);
  CHECK(done == 1000);
  CHECK(agreed == done);
}

TEST_CASE("A8 ironing keeps its contract on random distributions") {
  Clock::time_point t0 = Clock::now();
  std::mt19937_64 rng(8888);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int pairs = 0;
  bool bounded = true;     // x >= phi_bar(x), tol 1e-9
  bool monotone = true;    // phi_bar non-decreasing along the support
  bool dominated = true;   // hull r >= curve r, tol 1e-9
  bool concave = true;     // hull slopes non-increasing, tol 1e-12
  for (int it = 0; it < 10000; ++it) {
    ValueDistribution d = (it % 2 == 0) ? testgen::random_discrete_dist(rng)
                                        : testgen::random_continuous_dist(rng);
    double x, y;
    if (d.finite_support()) {
      const std::vector<double>& vals = d.support_values();
      std::size_t i = rng() % vals.size();
      std::size_t j = rng() % vals.size();
      x = vals[std::min(i, j)];
      y = vals[std::max(i, j)];
    } else {
      double qa = 1e-3 + 0.999 * u01(rng);
      double qb = 1e-3 + 0.999 * u01(rng);
      x = d.quantile_value(std::max(qa, qb));
      y = d.quantile_value(std::min(qa, qb));
    }
    double px = d.ironed_virtual_value(x);
    double py = d.ironed_virtual_value(y);
    bounded = bounded && px <= x + 1e-9 && py <= y + 1e-9;
    monotone = monotone && py >= px - 1e-9;
    ++pairs;

    QuantileCurve curve = d.quantile_curve(d.finite_support() ? 2 : 512);
    IronedCurve hull = d.finite_support()
                           ? d.exact_hull()
                           : IronedCurve::upper_hull(curve.q, curve.r);
    for (std::size_t k = 0; k + 1 < hull.slope.size(); ++k)
      concave = concave && hull.slope[k + 1] <= hull.slope[k] + 1e-12;
    for (std::size_t k = 0; k < curve.q.size(); ++k)
      dominated = dominated && hull_value_at(hull, curve.q[k]) >= curve.r[k] - 1e-9;
  }

  // Regular families: the grid-ironed slope at M = 2^16 must agree with the
  // closed-form virtual value. Quantiles stay in [0.05, 0.95]; nearer the
  // pareto tail the secant slope of a 2^-16 grid cell is genuinely coarser
  // than 1e-3.
  double worst_gap = 0.0;
  for (int it = 0; it < 250; ++it) {
    ValueDistribution d = testgen::random_continuous_dist(rng);
    IronedCurve grid = d.iron(1 << 16);
    for (int k = 0; k < 8; ++k) {
      double q = 0.05 + 0.9 * u01(rng);
      double gap = std::abs(grid.phi(q) - d.virtual_value(d.quantile_value(q)));
      worst_gap = std::max(worst_gap, gap);
    }
  }
  bool grid_ok = worst_gap <= 1e-3;
  double elapsed = ms_since(t0);
  bool ok = pairs == 10000 && bounded && monotone && dominated && concave && grid_ok;
  char buf[220];
  std::snprintf(buf, sizeof buf,
                "%d pairs: bound %s, monotone %s, hull dominates %s, concave %s; "
                "grid vs closed form worst gap %.3g (<= 1e-3 at M=2^16), %.0f ms",
                pairs, bounded ? "ok" : "BAD", monotone ? "ok" : "BAD",
                dominated ? "ok" : "BAD", concave ? "ok" : "BAD", worst_gap,
                elapsed);
  verdict("A8", ok, buf);
  CHECK(pairs == 10000);
  CHECK(bounded);
  CHECK(monotone);
  CHECK(dominated);
  CHECK(concave);
  CHECK(worst_gap <= 1e-3);
}

TEST_CASE("A9 expected revenue equals expected ironed virtual welfare") {
  Clock::time_point t0 = Clock::now();
  std::mt19937_64 rng(9009);
  int done = 0;
  double worst = 0.0;
  double worst_cross = 0.0;
  for (int attempt = 0; attempt < 400 && done < 20; ++attempt) {
    int n = 2 + attempt % 5;
    SetSystem s = (attempt % 2 == 0)
                      ? testgen::random_matroid(rng, n, attempt)
                      : testgen::random_nonmatroid(rng, std::max(3, n));
    if (rank_zero(s)) continue;
    n = s.ground_size();
    std::vector<ValueDistribution> dists;
    for (int i = 0; i < n; ++i)
      dists.push_back(testgen::random_discrete_dist(rng, 3));

    double rev = 0.0;
    double welfare = 0.0;
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    while (true) {
      std::vector<double> bids(static_cast<std::size_t>(n));
      double p = 1.0;
      for (int i = 0; i < n; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        bids[ii] = dists[ii].support_values()[pick[ii]];
        p *= dists[ii].support_probs()[pick[ii]];
      }
      AuctionOutcome out = myeropt(s, dists, bids);
      rev += p * out.revenue;
      for (int i : out.winners.to_vector())
        welfare += p * dists[static_cast<std::size_t>(i)].ironed_virtual_value(
                           bids[static_cast<std::size_t>(i)]);
      std::size_t slot = 0;
      for (; slot < pick.size(); ++slot) {
        if (++pick[slot] < dists[slot].support_values().size()) break;
        pick[slot] = 0;
      }
      if (slot == pick.size()) break;
    }
    worst = std::max(worst, std::abs(rev - welfare));

    // Same expectation through the scenario odometer.
    std::vector<BidderSpec> greens;
    for (int i = 0; i < n; ++i)
      greens.push_back(BidderSpec{dists[static_cast<std::size_t>(i)],
                                  Color::Green, {}, {}});
    Scenario sc(s, std::move(greens));
    double via_scenario =
        exact_expected_revenue(sc, Mechanism::MyerOPT, Include::AllBidders).mean;
    worst_cross = std::max(worst_cross, std::abs(rev - via_scenario));
    ++done;
  }
  double elapsed = ms_since(t0);
  bool ok = done == 20 && worst <= 1e-9 && worst_cross <= 1e-12;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%d all-discrete markets (n<=6), |rev - virtual welfare| <= %.3g "
                "(tol 1e-9), odometer cross-check gap %.3g, %.0f ms",
                done, worst, worst_cross, elapsed);
  verdict("A9", ok, buf);
  CHECK(done == 20);
  CHECK(worst <= 1e-9);
  CHECK(worst_cross <= 1e-12);
}

TEST_CASE("A10 monte carlo revenue monotonicity on matroid scenarios") {
  Clock::time_point t0 = Clock::now();
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int done = 0;
  int held = 0;
  bool all_mc = true;
  double min_margin = 1e300;
  for (int attempt = 0; attempt < 2000 && done < 100; ++attempt) {
    int n = 3 + attempt % 4;
    SetSystem s = testgen::random_matroid(rng, n, attempt);
    if (rank_zero(s)) continue;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    int red_count = 1 + attempt % (n - 1);
    ElemSet reds;
    for (int r = 0; r < red_count; ++r)
      reds = reds.with(order[static_cast<std::size_t>(r)]);

    std::vector<BidderSpec> bidders;
    for (int i = 0; i < n; ++i) {
      ValueDistribution spec = testgen::random_continuous_dist(rng);
      if (!reds.contains(i)) {
        bidders.push_back(BidderSpec{std::move(spec), Color::Green, {}, {}});
      } else if (attempt % 2 == 0) {
        double bid = spec.quantile_value(0.05 + 0.9 * u01(rng));
        bidders.push_back(BidderSpec{std::move(spec), Color::Red, bid, {}});
      } else {
        // True behavior drawn from a sub-interval of the specified support.
        double lo = spec.support_lo();
        double hi = spec.kind() == ValueDistribution::Kind::Uniform
                        ? spec.support_hi()
                        : lo + 3.0;
        double a = lo + 0.1 * (hi - lo) * u01(rng);
        double b = a + (hi - a) * (0.2 + 0.7 * u01(rng));
        bidders.push_back(BidderSpec{std::move(spec), Color::Red, {},
                                     ValueDistribution::uniform(a, b)});
      }
    }
    Scenario sc(s, std::move(bidders));
    RmmbReport rep =
        rmmb_check(sc, Mechanism::MyerOPT, 100000, 1000 + static_cast<std::uint64_t>(attempt));
    all_mc = all_mc && !rep.rev_all.exact && rep.rev_all.trials == 100000;
    min_margin = std::min(min_margin, rep.margin);
    if (rep.holds) ++held;
    ++done;
  }
  double elapsed = ms_since(t0);
  bool ok = done == 100 && held == done && all_mc && elapsed < 900000.0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%d matroid scenarios at 1e5 trials, holds %d/%d, min margin "
                "%.4g, %.0f ms (< 15 min)",
                done, held, done, min_margin, elapsed);
  verdict("A10", ok, buf);
  CHECK(done == 100);
  CHECK(held == done);
  CHECK(all_mc);
  CHECK(elapsed < 900000.0);
}
