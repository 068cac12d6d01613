#pragma once

// Constructive revenue-monotonicity violations. Every non-matroid market
// admits a witness pair (I, J) of independent sets with |I| > |J| where no
// element of I\J extends J. Seeding J with unit point-mass greens and I\J
// with reds who bid the break-even constant N/(N-2) makes MyerOPT earn
// |I∩J| + |I\J|/(N-2) with everyone present but |J| from the greens alone,
// so adding the reds strictly loses revenue once N > |I\J|/|J\I| + 2.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmmb/mechanism.hpp"
#include "rmmb/scenario.hpp"
#include "rmmb/set_system.hpp"

namespace rmmb {

struct CounterexampleReport {
  ElemSet witness_i;   // larger independent set
  ElemSet witness_j;   // smaller set that no element of I\J extends
  ElemSet green_set;   // = J
  ElemSet red_set;     // = I\J
  double n_param = 0.0;
  double rev_all = 0.0;
  double rev_green = 0.0;
  bool violated = false;
};

struct BuiltCounterexample {
  Scenario scenario;
  CounterexampleReport report;
};

struct VcgWitness {
  ElemSet v;         // I union J
  ElementId x = 0;   // dropped bidder, smallest id in I\J
  double rev_v = 0.0;
  double rev_v_minus_x = 0.0;
};

namespace detail {

inline std::pair<ElemSet, ElemSet> require_witness(const SetSystem& system) {
  if (system.ground_size() > 20)
    throw contract_error("counterexample construction needs at most 20 elements");
  auto wit = system.nonmatroid_witness();
  if (!wit)
    throw contract_error("system is a matroid; revenue monotonicity holds");
  return *wit;
}

}  // namespace detail

inline BuiltCounterexample build_rmmb_counterexample(
    const SetSystem& system, std::optional<double> n_override = std::nullopt) {
  auto [wi, wj] = detail::require_witness(system);
  ElemSet reds = wi - wj;
  double n_param = n_override.value_or(static_cast<double>(reds.size()) + 3.0);
  if (n_param <= 2.0) throw contract_error("n_param must exceed 2");

  std::vector<BidderSpec> bidders;
  for (int e = 0; e < system.ground_size(); ++e) {
    if (reds.contains(e))
      bidders.push_back(BidderSpec{ValueDistribution::pareto_like(n_param),
                                   Color::Red, n_param / (n_param - 2.0), {}});
    else if (wj.contains(e))
      bidders.push_back(
          BidderSpec{ValueDistribution::point_mass(1.0), Color::Green, {}, {}});
    else
      bidders.push_back(
          BidderSpec{ValueDistribution::point_mass(0.0), Color::Green, {}, {}});
  }

  BuiltCounterexample built{
      Scenario(system, std::move(bidders), "rmmb-counterexample"), {}};
  CounterexampleReport& rep = built.report;
  rep.witness_i = wi;
  rep.witness_j = wj;
  rep.green_set = wj;
  rep.red_set = reds;
  rep.n_param = n_param;
  RmmbReport check = rmmb_check(built.scenario, Mechanism::MyerOPT, 1, 1);
  rep.rev_all = check.rev_all.mean;
  rep.rev_green = check.rev_green.mean;
  rep.violated = rep.rev_all < rep.rev_green - 1e-9;
  return built;
}

// Recomputes both revenues from the realized bid profile. When the mechanism
// happens to allocate exactly I, the revenue must match the closed form
// |I∩J| + |I\J|/(N-2); any other maximum-cardinality winner set is a
// legitimate tie resolution and only the revenue drop itself is checked.
inline bool verify_rmmb_counterexample(const CounterexampleReport& rep,
                                       const Scenario& scenario) {
  std::vector<double> bids;
  for (const BidderSpec& b : scenario.bidders())
    bids.push_back(b.color == Color::Red ? *b.fixed_bid
                                         : b.specified.support_lo());
  AuctionOutcome all =
      myeropt(scenario.market(), scenario.specified_dists(), bids);
  if (std::abs(all.revenue - rep.rev_all) > 1e-9) return false;

  std::vector<double> green_bids;
  for (ElementId e : scenario.green_set().to_vector())
    green_bids.push_back(bids[static_cast<std::size_t>(e)]);
  AuctionOutcome greens =
      myeropt(scenario.green_market(), scenario.green_dists(), green_bids);
  if (std::abs(greens.revenue - rep.rev_green) > 1e-9) return false;
  if (std::abs(rep.rev_green - static_cast<double>(rep.witness_j.size())) >
      1e-9)
    return false;

  if (all.winners == rep.witness_i) {
    double formula =
        static_cast<double>((rep.witness_i & rep.witness_j).size()) +
        static_cast<double>(rep.red_set.size()) / (rep.n_param - 2.0);
    return std::abs(rep.rev_all - formula) <= 1e-9;
  }
  return rep.rev_all < rep.rev_green;
}

inline VcgWitness vcg_witness(const SetSystem& system) {
  auto [wi, wj] = detail::require_witness(system);
  VcgWitness out;
  out.v = wi | wj;
  out.x = (wi - wj).min_element();

  auto ones_on = [&](ElemSet s) {
    std::vector<double> bids(static_cast<std::size_t>(system.ground_size()),
                             0.0);
    for (ElementId e : s.to_vector()) bids[static_cast<std::size_t>(e)] = 1.0;
    return vcg(system, bids).revenue;
  };
  out.rev_v = ones_on(out.v);
  out.rev_v_minus_x = ones_on(out.v.without(out.x));
  if (out.rev_v_minus_x < out.rev_v + 1.0 - 1e-9)
    throw std::logic_error("dropping a bidder failed to raise VCG revenue");
  return out;
}

// The five-element system whose maximal-set exchange table is checked row by
// row: uniform rank 3 on {0,1,2,3} joined with {0,2,4} and {1,3,4}. It is
// not a matroid, yet for every pair of maximal sets A, B and y in B some
// x in A keeps A-x+y independent.
struct DrsCaseRow {
  ElemSet a;
  ElemSet b;
  ElementId y = 0;
  ElementId x = 0;
};

struct DrsReport {
  SetSystem system;
  bool matroid = true;
  std::vector<DrsCaseRow> rows;   // every ordered pair A != B, every y in B
};

inline DrsReport drs_counterexample() {
  std::vector<ElemSet> maximal = {
      ElemSet::of({0, 1, 2}), ElemSet::of({0, 1, 3}), ElemSet::of({0, 2, 3}),
      ElemSet::of({1, 2, 3}), ElemSet::of({0, 2, 4}), ElemSet::of({1, 3, 4})};
  DrsReport rep{SetSystem::explicit_family(5, maximal, true), true, {}};
  rep.matroid = rep.system.is_matroid();

  std::vector<ElemSet> bases = rep.system.maximal_independent_sets();
  for (ElemSet a : bases) {
    for (ElemSet b : bases) {
      if (a == b) continue;   // x = y for any y in B = A
      for (ElementId y : b.to_vector()) {
        std::optional<ElementId> x;
        if (a.contains(y)) {
          x = y;
        } else {
          for (ElementId cand : a.to_vector()) {
            if (rep.system.is_independent(a.without(cand).with(y))) {
              x = cand;
              break;
            }
          }
        }
        if (!x)
          throw std::logic_error("maximal-set exchange has no valid swap");
        rep.rows.push_back(DrsCaseRow{a, b, y, *x});
      }
    }
  }
  return rep;
}

struct RatioRow {
  double n_param = 0.0;
  double rev_all = 0.0;
  double rev_green = 0.0;
  double ratio = 0.0;   // rev_green / rev_all
  bool violated = false;
};

inline std::vector<RatioRow> ratio_experiment(const SetSystem& system,
                                              const std::vector<double>& n_params) {
  std::vector<RatioRow> rows;
  for (double n : n_params) {
    BuiltCounterexample built = build_rmmb_counterexample(system, n);
    RatioRow row;
    row.n_param = n;
    row.rev_all = built.report.rev_all;
    row.rev_green = built.report.rev_green;
    row.ratio = built.report.rev_green / built.report.rev_all;
    row.violated = built.report.violated;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rmmb
