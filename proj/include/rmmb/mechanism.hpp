#pragma once

// The two auction mechanisms over a set-system market. Allocation maximizes
// total weight (clamped ironed virtuals, or raw bids for the welfare
// mechanism) over independent sets; payments are critical bids derived from
// an exact combinatorial win-threshold, so no numeric search is involved.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmmb/distribution.hpp"
#include "rmmb/errors.hpp"
#include "rmmb/set_system.hpp"

namespace rmmb {

struct AuctionOutcome {
  ElemSet winners;
  std::vector<double> payments;
  std::vector<double> virtuals;
  double revenue = 0.0;
};

// Merge per-color bid lists into one profile. green/red must partition the
// ground set; bids pair with their set's elements in ascending id order.
inline std::vector<double> interleave(int n, ElemSet green, ElemSet red,
                                      const std::vector<double>& green_bids,
                                      const std::vector<double>& red_bids) {
  if (!(green & red).empty())
    throw contract_error("green and red sets overlap");
  if ((green | red) != ElemSet::full(n))
    throw contract_error("green and red sets must cover every bidder");
  if (green_bids.size() != static_cast<std::size_t>(green.size()) ||
      red_bids.size() != static_cast<std::size_t>(red.size()))
    throw contract_error("bid count does not match its color set");
  std::vector<double> bids(static_cast<std::size_t>(n), 0.0);
  std::size_t g = 0;
  for (ElementId e : green.to_vector())
    bids[static_cast<std::size_t>(e)] = green_bids[g++];
  std::size_t r = 0;
  for (ElementId e : red.to_vector())
    bids[static_cast<std::size_t>(e)] = red_bids[r++];
  return bids;
}

namespace detail {

inline void check_profile(const SetSystem& system,
                          const std::vector<ValueDistribution>& dists,
                          const std::vector<double>& bids) {
  std::size_t n = static_cast<std::size_t>(system.ground_size());
  if (dists.size() != n) throw contract_error("one distribution per bidder");
  if (bids.size() != n) throw contract_error("one bid per bidder");
}

inline std::vector<double> ironed_virtuals(
    const std::vector<ValueDistribution>& dists, const std::vector<double>& bids) {
  std::vector<double> v(bids.size());
  for (std::size_t i = 0; i < bids.size(); ++i)
    v[i] = dists[i].ironed_virtual_value(bids[i]);
  return v;
}

inline WeightVector clamp_nonnegative(const std::vector<double>& virtuals) {
  WeightVector w(virtuals.size());
  for (std::size_t i = 0; i < virtuals.size(); ++i)
    w[i] = virtuals[i] > 0.0 ? virtuals[i] : 0.0;
  return w;
}

inline ElemSet allocate(const SetSystem& system, const WeightVector& w) {
  return system.is_matroid() ? system.greedy_max_weight(w)
                             : system.brute_force_max_weight(w);
}

// Win boundary for bidder i in virtual-value space: i wins with virtual z
// exactly when z > value, or z >= value when strict is false.
struct WinThreshold {
  double value = 0.0;
  bool strict = true;
};

inline WinThreshold threshold_for(const SetSystem& system,
                                  const WeightVector& w, ElementId i) {
  std::size_t ui = static_cast<std::size_t>(i);
  if (system.is_matroid()) {
    WeightVector others = w;
    others[ui] = 0.0;
    ElemSet s = system.greedy_max_weight(others);
    if (system.is_independent(s.with(i))) return {0.0, true};
    Circuit c = *system.find_circuit(s, i);
    ElementId weakest = -1;
    for (ElementId e : c.to_vector()) {
      if (e == i) continue;
      if (weakest < 0) {
        weakest = e;
        continue;
      }
      double we = w[static_cast<std::size_t>(e)];
      double wk = w[static_cast<std::size_t>(weakest)];
      if (we < wk || (we == wk && e > weakest)) weakest = e;
    }
    return {w[static_cast<std::size_t>(weakest)], i > weakest};
  }
  // Exhaustive split: the best rivals can do without i, against the best
  // they contribute alongside i. Ties replay the allocation's lex rule.
  ElemSet cand;
  for (int e = 0; e < system.ground_size(); ++e)
    if (e == i || w[static_cast<std::size_t>(e)] > 0.0) cand = cand.with(e);
  double best_without = -1.0, best_with = -1.0;
  ElemSet tie_without, tie_with;
  for (ElemSet k : system.independent_sets()) {
    if (!k.subset_of(cand)) continue;
    double total = 0.0;
    for (ElementId e : k.to_vector())
      if (e != i) total += w[static_cast<std::size_t>(e)];
    if (k.contains(i)) {
      if (total > best_with ||
          (total == best_with && lex_less(k, tie_with))) {
        best_with = total;
        tie_with = k;
      }
    } else {
      if (total > best_without ||
          (total == best_without && lex_less(k, tie_without))) {
        best_without = total;
        tie_without = k;
      }
    }
  }
  if (best_with < 0.0)
    throw contract_error("bidder cannot belong to any independent set");
  double raw = best_without - best_with;
  if (raw <= 0.0) return {0.0, true};
  return {raw, !lex_less(tie_with, tie_without)};
}

// Least in-support bid that clears the threshold. Winning also requires a
// positive clamped weight, which the threshold already encodes: value 0 with
// strict means the bid only has to push the ironed virtual above zero.
inline double payment_from_threshold(const ValueDistribution& dist,
                                     WinThreshold t) {
  if (!dist.finite_support()) return dist.inverse_ironed_virtual(t.value);
  for (double atom : dist.support_values()) {
    double pv = dist.ironed_virtual_value(atom);
    if (t.strict ? pv > t.value : pv >= t.value) return atom;
  }
  throw std::logic_error("winner has no support value clearing its threshold");
}

}  // namespace detail

inline ElemSet myeropt_allocate(const SetSystem& system,
                                const std::vector<ValueDistribution>& dists,
                                const std::vector<double>& bids) {
  detail::check_profile(system, dists, bids);
  return detail::allocate(
      system, detail::clamp_nonnegative(detail::ironed_virtuals(dists, bids)));
}

inline double critical_payment(const SetSystem& system,
                               const std::vector<ValueDistribution>& dists,
                               const std::vector<double>& bids, ElementId i) {
  detail::check_profile(system, dists, bids);
  if (i < 0 || i >= system.ground_size())
    throw contract_error("element id out of range");
  WeightVector w =
      detail::clamp_nonnegative(detail::ironed_virtuals(dists, bids));
  if (!detail::allocate(system, w).contains(i))
    throw contract_error("critical payment is defined only for winners");
  return detail::payment_from_threshold(dists[static_cast<std::size_t>(i)],
                                        detail::threshold_for(system, w, i));
}

inline AuctionOutcome myeropt(const SetSystem& system,
                              const std::vector<ValueDistribution>& dists,
                              const std::vector<double>& bids) {
  detail::check_profile(system, dists, bids);
  AuctionOutcome out;
  out.virtuals = detail::ironed_virtuals(dists, bids);
  WeightVector w = detail::clamp_nonnegative(out.virtuals);
  out.winners = detail::allocate(system, w);
  out.payments.assign(bids.size(), 0.0);
  for (ElementId i : out.winners.to_vector()) {
    double pay = detail::payment_from_threshold(
        dists[static_cast<std::size_t>(i)], detail::threshold_for(system, w, i));
    out.payments[static_cast<std::size_t>(i)] = pay;
    out.revenue += pay;
  }
  return out;
}

// Welfare-maximizing auction with pivot payments; distribution-free, so the
// bids double as the welfare weights reported in virtuals.
inline AuctionOutcome vcg(const SetSystem& system,
                          const std::vector<double>& bids) {
  if (bids.size() != static_cast<std::size_t>(system.ground_size()))
    throw contract_error("one bid per bidder");
  for (double b : bids)
    if (b < 0.0) throw contract_error("negative bid");
  AuctionOutcome out;
  out.virtuals = bids;
  out.winners = detail::allocate(system, bids);
  out.payments.assign(bids.size(), 0.0);
  double welfare = 0.0;
  for (ElementId e : out.winners.to_vector())
    welfare += bids[static_cast<std::size_t>(e)];
  for (ElementId i : out.winners.to_vector()) {
    WeightVector masked = bids;
    masked[static_cast<std::size_t>(i)] = 0.0;
    ElemSet alt = detail::allocate(system, masked);
    double alt_welfare = 0.0;
    for (ElementId e : alt.to_vector())
      alt_welfare += masked[static_cast<std::size_t>(e)];
    double pay = alt_welfare - (welfare - bids[static_cast<std::size_t>(i)]);
    out.payments[static_cast<std::size_t>(i)] = pay;
    out.revenue += pay;
  }
  return out;
}

}  // namespace rmmb
