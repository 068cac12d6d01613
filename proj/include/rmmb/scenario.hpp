#pragma once

// Markets where some bidders are modeled wrongly. Green bidders draw values
// from the distribution the seller believes; red bidders bid a constant or
// draw from a different true distribution while the mechanism keeps pricing
// them by the specified one. rmmb_check compares expected revenue on the
// full market against the market restricted to the greens, using common
// random numbers: the draw for bidder i in trial t is keyed by (seed, t, i),
// so both arms see identical green values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmmb/distribution.hpp"
#include "rmmb/mechanism.hpp"
#include "rmmb/rng.hpp"
#include "rmmb/set_system.hpp"

namespace rmmb {

enum class Color { Green, Red };
enum class Mechanism { MyerOPT, Vcg };
enum class Include { AllBidders, GreenOnly };

struct BidderSpec {
  ValueDistribution specified;
  Color color = Color::Green;
  // Red behavior: exactly one of these.
  std::optional<double> fixed_bid;
  std::optional<ValueDistribution> true_dist;
};

struct RevenueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  bool exact = false;
};

struct RmmbReport {
  std::string scenario_id;
  Mechanism mechanism = Mechanism::MyerOPT;
  RevenueEstimate rev_all;
  RevenueEstimate rev_green;
  bool holds = false;
  double margin = 0.0;
};

class Scenario {
 public:
  Scenario(SetSystem market, std::vector<BidderSpec> bidders,
           std::string id = "")
      : market_(std::move(market)),
        bidders_(std::move(bidders)),
        id_(std::move(id)) {
    if (static_cast<std::size_t>(market_.ground_size()) != bidders_.size())
      throw contract_error("one bidder per market element");
    for (std::size_t i = 0; i < bidders_.size(); ++i) {
      BidderSpec& b = bidders_[i];
      if (b.color == Color::Green) {
        if (b.fixed_bid || b.true_dist)
          throw contract_error("green bidders carry no red behavior");
        green_ = green_.with(static_cast<int>(i));
        continue;
      }
      if (b.fixed_bid.has_value() == b.true_dist.has_value())
        throw contract_error("red bidders need exactly one behavior");
      if (b.fixed_bid) {
        double bid = *b.fixed_bid;
        if (!std::isfinite(bid)) throw contract_error("red bid must be finite");
        double snapped = snap_into_support(b.specified, bid);
        if (snapped != bid) {
          warnings_.push_back("bidder " + std::to_string(i) + ": fixed bid " +
                              std::to_string(bid) +
                              " moved into the support as " +
                              std::to_string(snapped));
          b.fixed_bid = snapped;
        }
      }
      red_ = red_.with(static_cast<int>(i));
    }
    green_market_ = market_.restriction(green_);
    for (ElementId e : green_.to_vector())
      green_dists_.push_back(bidders_[static_cast<std::size_t>(e)].specified);
  }

  const SetSystem& market() const { return market_; }
  const std::vector<BidderSpec>& bidders() const { return bidders_; }
  const std::string& id() const { return id_; }
  ElemSet green_set() const { return green_; }
  ElemSet red_set() const { return red_; }
  const SetSystem& green_market() const { return green_market_; }
  const std::vector<ValueDistribution>& green_dists() const {
    return green_dists_;
  }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::vector<ValueDistribution> specified_dists() const {
    std::vector<ValueDistribution> d;
    for (const BidderSpec& b : bidders_) d.push_back(b.specified);
    return d;
  }

 private:
  static double snap_into_support(const ValueDistribution& d, double bid) {
    if (d.in_support(bid)) return bid;
    if (!d.finite_support()) return std::clamp(bid, d.support_lo(), d.support_hi());
    // Nearest atom, resolving midpoints downward.
    double best = d.support_values().front();
    for (double v : d.support_values())
      if (std::abs(v - bid) < std::abs(best - bid)) best = v;
    return best;
  }

  SetSystem market_;
  std::vector<BidderSpec> bidders_;
  std::string id_;
  ElemSet green_;
  ElemSet red_;
  SetSystem green_market_ = SetSystem::uniform(0, 0);
  std::vector<ValueDistribution> green_dists_;
  std::vector<std::string> warnings_;
};

// Realized bid profile: greens and true-dist reds consume one draw each (in
// ascending bidder order), fixed-bid reds bid their constant.
inline std::vector<double> sample_profile(const Scenario& s,
                                          const std::vector<double>& green_draws,
                                          const std::vector<double>& red_draws) {
  std::size_t gi = 0, ri = 0, need_red = 0;
  for (ElementId e : s.red_set().to_vector())
    if (s.bidders()[static_cast<std::size_t>(e)].true_dist) ++need_red;
  if (green_draws.size() != static_cast<std::size_t>(s.green_set().size()) ||
      red_draws.size() != need_red)
    throw contract_error("draw count does not match the bidder lists");
  std::vector<double> bids(s.bidders().size(), 0.0);
  for (std::size_t i = 0; i < s.bidders().size(); ++i) {
    const BidderSpec& b = s.bidders()[i];
    if (b.color == Color::Green)
      bids[i] = b.specified.sample(green_draws[gi++]);
    else if (b.fixed_bid)
      bids[i] = *b.fixed_bid;
    else
      bids[i] = b.true_dist->sample(red_draws[ri++]);
  }
  return bids;
}

namespace detail {

inline double profile_revenue(const Scenario& s, Mechanism mech, Include inc,
                              const std::vector<double>& all_bids) {
  if (inc == Include::AllBidders) {
    if (mech == Mechanism::Vcg) return vcg(s.market(), all_bids).revenue;
    return myeropt(s.market(), s.specified_dists(), all_bids).revenue;
  }
  std::vector<double> green_bids;
  green_bids.reserve(static_cast<std::size_t>(s.green_set().size()));
  for (ElementId e : s.green_set().to_vector())
    green_bids.push_back(all_bids[static_cast<std::size_t>(e)]);
  if (mech == Mechanism::Vcg) return vcg(s.green_market(), green_bids).revenue;
  return myeropt(s.green_market(), s.green_dists(), green_bids).revenue;
}

// (value, probability) outcomes for one bidder, for exact enumeration.
inline std::vector<std::pair<double, double>> bid_atoms(const BidderSpec& b) {
  const ValueDistribution* d = &b.specified;
  if (b.color == Color::Red) {
    if (b.fixed_bid) return {{*b.fixed_bid, 1.0}};
    d = &*b.true_dist;
  }
  if (!d->finite_support())
    throw contract_error("exact expectation needs finite supports");
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t j = 0; j < d->support_values().size(); ++j)
    atoms.emplace_back(d->support_values()[j], d->support_probs()[j]);
  return atoms;
}

}  // namespace detail

inline bool exactly_enumerable(const Scenario& s, double max_profiles = 1e6) {
  double product = 1.0;
  for (const BidderSpec& b : s.bidders()) {
    const ValueDistribution* d = &b.specified;
    if (b.color == Color::Red) {
      if (b.fixed_bid) continue;
      d = &*b.true_dist;
    }
    if (!d->finite_support()) return false;
    product *= static_cast<double>(d->support_values().size());
    if (product > max_profiles) return false;
  }
  return true;
}

inline RevenueEstimate exact_expected_revenue(const Scenario& s, Mechanism mech,
                                              Include inc) {
  std::vector<std::vector<std::pair<double, double>>> atoms;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < s.bidders().size(); ++i) {
    if (inc == Include::GreenOnly &&
        s.bidders()[i].color != Color::Green)
      continue;
    atoms.push_back(detail::bid_atoms(s.bidders()[i]));
    owner.push_back(i);
  }
  double profiles = 1.0;
  for (const auto& a : atoms) profiles *= static_cast<double>(a.size());
  if (profiles > 1e6) throw contract_error("profile enumeration too large");

  std::vector<double> bids(s.bidders().size(), 0.0);
  std::vector<std::size_t> idx(atoms.size(), 0);
  RevenueEstimate est;
  est.exact = true;
  double mean = 0.0;
  std::int64_t count = 0;
  while (true) {
    double prob = 1.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      bids[owner[k]] = atoms[k][idx[k]].first;
      prob *= atoms[k][idx[k]].second;
    }
    // Green-only evaluation reads only green positions from `bids`.
    mean += prob * detail::profile_revenue(s, mech, inc, bids);
    ++count;
    std::size_t k = 0;
    while (k < atoms.size() && ++idx[k] == atoms[k].size()) idx[k++] = 0;
    if (k == atoms.size()) break;
  }
  est.mean = mean;
  est.trials = count;
  return est;
}

inline RevenueEstimate estimate_revenue(const Scenario& s, Mechanism mech,
                                        Include inc, std::int64_t trials,
                                        std::uint64_t seed) {
  if (trials < 1) throw contract_error("trials must be at least 1");
  double sum = 0.0, sumsq = 0.0;
  std::vector<double> bids(s.bidders().size(), 0.0);
  for (std::int64_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < s.bidders().size(); ++i) {
      const BidderSpec& b = s.bidders()[i];
      if (b.color == Color::Green)
        bids[i] = b.specified.sample(
            substream_uniform(seed, static_cast<std::uint64_t>(t), i));
      else if (b.fixed_bid)
        bids[i] = *b.fixed_bid;
      else
        bids[i] = b.true_dist->sample(
            substream_uniform(seed, static_cast<std::uint64_t>(t), i));
    }
    double r = detail::profile_revenue(s, mech, inc, bids);
    sum += r;
    sumsq += r * r;
  }
  RevenueEstimate est;
  est.trials = trials;
  est.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double var = (sumsq - sum * est.mean) / static_cast<double>(trials - 1);
    est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
  }
  return est;
}

// Exact enumeration whenever every bid distribution is finite and small
// enough; Monte Carlo with common random numbers otherwise. holds allows a
// slack of three pooled standard errors plus 1e-9 so that the exact equality
// case cannot flip on rounding.
inline RmmbReport rmmb_check(const Scenario& s, Mechanism mech,
                             std::int64_t trials, std::uint64_t seed) {
  RmmbReport rep;
  rep.scenario_id = s.id();
  rep.mechanism = mech;
  if (exactly_enumerable(s)) {
    rep.rev_all = exact_expected_revenue(s, mech, Include::AllBidders);
    rep.rev_green = exact_expected_revenue(s, mech, Include::GreenOnly);
  } else {
    rep.rev_all = estimate_revenue(s, mech, Include::AllBidders, trials, seed);
    rep.rev_green = estimate_revenue(s, mech, Include::GreenOnly, trials, seed);
  }
  rep.margin = rep.rev_all.mean - rep.rev_green.mean;
  double pooled = std::hypot(rep.rev_all.std_error, rep.rev_green.std_error);
  rep.holds = rep.margin >= -(3.0 * pooled + 1e-9);
  return rep;
}

}  // namespace rmmb
