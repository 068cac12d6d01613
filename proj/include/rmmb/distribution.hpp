#pragma once

// Bidder value distributions with virtual values and ironing. Quantiles are
// tail probabilities: q(x) = P[v >= x], so revenue in quantile space is
// R(q) = q * v(q) and the ironed virtual value is the slope of R's concave
// majorant. Uniform and the pareto-like family are regular, so their ironed
// values equal the closed-form virtual values; finite supports iron the exact
// breakpoint curve. A grid route (iron / quantile_curve) exists as an
// independent cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rmmb/errors.hpp"

namespace rmmb {

inline constexpr double kSupportTol = 1e-9;

struct QuantileCurve {
  std::vector<double> q;
  std::vector<double> v;
  std::vector<double> r;
};

// Piecewise-linear concave majorant of a revenue curve. q[0] = 0 and the
// vertices are strictly increasing in q; slope[k] covers (q[k], q[k+1]].
struct IronedCurve {
  std::vector<double> q;
  std::vector<double> r;
  std::vector<double> slope;

  static IronedCurve upper_hull(const std::vector<double>& qs,
                                const std::vector<double>& rs) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      while (keep.size() >= 2) {
        std::size_t a = keep[keep.size() - 2];
        std::size_t b = keep.back();
        double cross = (qs[b] - qs[a]) * (rs[i] - rs[a]) -
                       (rs[b] - rs[a]) * (qs[i] - qs[a]);
        if (cross >= 0.0)
          keep.pop_back();
        else
          break;
      }
      keep.push_back(i);
    }
    IronedCurve c;
    c.q.reserve(keep.size());
    c.r.reserve(keep.size());
    for (std::size_t i : keep) {
      c.q.push_back(qs[i]);
      c.r.push_back(rs[i]);
    }
    for (std::size_t k = 0; k + 1 < c.q.size(); ++k)
      c.slope.push_back((c.r[k + 1] - c.r[k]) / (c.q[k + 1] - c.q[k]));
    return c;
  }

  // Left derivative at interior vertices, right derivative at q = 0.
  double phi(double quantile) const {
    if (quantile < -kSupportTol || quantile > 1.0 + kSupportTol)
      throw contract_error("quantile outside [0, 1]");
    if (slope.empty()) throw contract_error("degenerate ironed curve");
    auto it = std::lower_bound(q.begin() + 1, q.end(), quantile);
    if (it == q.end()) return slope.back();
    std::size_t k = static_cast<std::size_t>(it - q.begin());
    return slope[k - 1];
  }

  double revenue(double quantile) const {
    if (quantile < -kSupportTol || quantile > 1.0 + kSupportTol)
      throw contract_error("quantile outside [0, 1]");
    if (slope.empty()) throw contract_error("degenerate ironed curve");
    auto it = std::lower_bound(q.begin() + 1, q.end(), quantile);
    std::size_t k = it == q.end() ? q.size() - 1
                                  : static_cast<std::size_t>(it - q.begin());
    return r[k - 1] + slope[k - 1] * (quantile - q[k - 1]);
  }
};

class ValueDistribution {
 public:
  enum class Kind { Uniform, ParetoLike, PointMass, Discrete };

  static ValueDistribution uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo))
      throw contract_error("uniform support needs 0 <= lo < hi");
    ValueDistribution d(Kind::Uniform);
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
  }

  // F(x) = 1 - (1 + x)^(1 - n) on [0, inf); regular only for n > 2.
  static ValueDistribution pareto_like(double n_param) {
    if (!(n_param > 2.0))
      throw contract_error("pareto-like parameter must exceed 2");
    ValueDistribution d(Kind::ParetoLike);
    d.n_param_ = n_param;
    return d;
  }

  static ValueDistribution point_mass(double value) {
    if (!(value >= 0.0)) throw contract_error("point mass value must be >= 0");
    ValueDistribution d(Kind::PointMass);
    d.values_ = {value};
    d.probs_ = {1.0};
    d.tail_ = {1.0};
    d.build_finite_hull();
    return d;
  }

  static ValueDistribution discrete(std::vector<double> values,
                                    std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
      throw contract_error("discrete support and probabilities must align");
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    ValueDistribution d(Kind::Discrete);
    double total = 0.0;
    for (std::size_t i : order) {
      if (!(values[i] >= 0.0))
        throw contract_error("discrete support values must be >= 0");
      if (!(probs[i] > 0.0))
        throw contract_error("discrete probabilities must be positive");
      if (!d.values_.empty() && values[i] - d.values_.back() <= kSupportTol)
        throw contract_error("discrete support values must be distinct");
      d.values_.push_back(values[i]);
      d.probs_.push_back(probs[i]);
      total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw contract_error("discrete probabilities must sum to 1");
    d.tail_.assign(d.values_.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = d.values_.size(); j-- > 0;) {
      acc += d.probs_[j];
      d.tail_[j] = acc;
    }
    d.build_finite_hull();
    return d;
  }

  Kind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double n_param() const { return n_param_; }
  bool finite_support() const {
    return kind_ == Kind::PointMass || kind_ == Kind::Discrete;
  }
  const std::vector<double>& support_values() const { return values_; }
  const std::vector<double>& support_probs() const { return probs_; }

  double support_lo() const {
    switch (kind_) {
      case Kind::Uniform: return lo_;
      case Kind::ParetoLike: return 0.0;
      default: return values_.front();
    }
  }
  // Infinite for the pareto-like family.
  double support_hi() const {
    switch (kind_) {
      case Kind::Uniform: return hi_;
      case Kind::ParetoLike: return std::numeric_limits<double>::infinity();
      default: return values_.back();
    }
  }

  bool in_support(double x) const {
    switch (kind_) {
      case Kind::Uniform:
        return x >= lo_ - kSupportTol && x <= hi_ + kSupportTol;
      case Kind::ParetoLike:
        return x >= -kSupportTol;
      case Kind::PointMass:
        return std::abs(x - values_[0]) <= kSupportTol;
      case Kind::Discrete:
        return atom_index(x) >= 0;
    }
    return false;
  }

  double cdf(double x) const {
    switch (kind_) {
      case Kind::Uniform:
        if (x < lo_) return 0.0;
        if (x >= hi_) return 1.0;
        return (x - lo_) / (hi_ - lo_);
      case Kind::ParetoLike:
        if (x < 0.0) return 0.0;
        return 1.0 - std::pow(1.0 + x, 1.0 - n_param_);
      default: {
        double acc = 0.0;
        for (std::size_t j = 0; j < values_.size(); ++j)
          if (values_[j] <= x + kSupportTol) acc += probs_[j];
        return std::min(acc, 1.0);
      }
    }
  }

  // Tail quantile: the least value v with P[draw <= v] >= 1 - q. Small q
  // means a high value; q = 0 on an unbounded support is +inf.
  double quantile_value(double q) const {
    if (q < -kSupportTol || q > 1.0 + kSupportTol)
      throw contract_error("quantile outside [0, 1]");
    q = std::clamp(q, 0.0, 1.0);
    switch (kind_) {
      case Kind::Uniform:
        return lo_ + (1.0 - q) * (hi_ - lo_);
      case Kind::ParetoLike:
        if (q == 0.0) return std::numeric_limits<double>::infinity();
        return std::pow(q, -1.0 / (n_param_ - 1.0)) - 1.0;
      default:
        for (std::size_t j = 0; j < values_.size(); ++j) {
          double tail_after = j + 1 < tail_.size() ? tail_[j + 1] : 0.0;
          if (tail_after <= q) return values_[j];
        }
        return values_.back();
    }
  }

  double sample(double u) const { return quantile_value(u); }

  // Closed-form Myerson virtual value; needs a density, so finite supports
  // reject and must go through the ironed value instead.
  double virtual_value(double x) const {
    switch (kind_) {
      case Kind::Uniform:
        require_support(x);
        return 2.0 * std::clamp(x, lo_, hi_) - hi_;
      case Kind::ParetoLike:
        require_support(x);
        return ((n_param_ - 2.0) * std::max(x, 0.0) - 1.0) / (n_param_ - 1.0);
      default:
        throw contract_error("virtual value needs a density; use the ironed value");
    }
  }

  double ironed_virtual_value(double x) const {
    switch (kind_) {
      case Kind::Uniform:
      case Kind::ParetoLike:
        return virtual_value(x);
      case Kind::PointMass:
        require_support(x);
        return values_[0];
      case Kind::Discrete: {
        int j = atom_index(x);
        if (j < 0) throw contract_error("bid is not a support value");
        return hull_.phi(tail_[static_cast<std::size_t>(j)]);
      }
    }
    throw contract_error("unreachable distribution kind");
  }

  // Least in-support bid whose ironed virtual value reaches y; throws when
  // no bid does.
  double inverse_ironed_virtual(double y) const {
    switch (kind_) {
      case Kind::Uniform:
        if (y > hi_ + kSupportTol)
          throw contract_error("no bid attains the requested ironed virtual value");
        return std::clamp((y + hi_) / 2.0, lo_, hi_);
      case Kind::ParetoLike:
        return std::max(0.0, ((n_param_ - 1.0) * y + 1.0) / (n_param_ - 2.0));
      default:
        for (std::size_t j = 0; j < values_.size(); ++j)
          if (hull_.phi(tail_[j]) >= y) return values_[j];
        throw contract_error("no bid attains the requested ironed virtual value");
    }
  }

  // Revenue curve sampled for the grid ironing route. Finite supports return
  // their exact breakpoints; continuous kinds place grid_m + 1 points, with
  // the pareto-like tail truncated at q = 1e-8 to keep values finite.
  QuantileCurve quantile_curve(int grid_m) const {
    QuantileCurve c;
    if (finite_support()) {
      c.q.push_back(0.0);
      c.v.push_back(values_.back());
      c.r.push_back(0.0);
      for (std::size_t j = values_.size(); j-- > 0;) {
        c.q.push_back(tail_[j]);
        c.v.push_back(values_[j]);
        c.r.push_back(tail_[j] * values_[j]);
      }
      return c;
    }
    if (grid_m < 2) throw contract_error("ironing grid needs at least 2 cells");
    for (int j = 0; j <= grid_m; ++j) {
      double q = static_cast<double>(j) / grid_m;
      double qq = kind_ == Kind::ParetoLike ? std::max(q, 1e-8) : q;
      double v = quantile_value(qq);
      c.q.push_back(q);
      c.v.push_back(v);
      c.r.push_back(q * v);
    }
    return c;
  }

  IronedCurve iron(int grid_m) const {
    QuantileCurve c = quantile_curve(grid_m);
    return IronedCurve::upper_hull(c.q, c.r);
  }

  // Exact breakpoint hull; finite supports only.
  const IronedCurve& exact_hull() const {
    if (!finite_support())
      throw contract_error("exact hull exists only for finite supports");
    return hull_;
  }

 private:
  explicit ValueDistribution(Kind kind) : kind_(kind) {}

  void require_support(double x) const {
    if (!in_support(x)) throw contract_error("value outside the support");
  }

  int atom_index(double x) const {
    for (std::size_t j = 0; j < values_.size(); ++j)
      if (std::abs(x - values_[j]) <= kSupportTol) return static_cast<int>(j);
    return -1;
  }

  void build_finite_hull() {
    std::vector<double> qs = {0.0};
    std::vector<double> rs = {0.0};
    for (std::size_t j = values_.size(); j-- > 0;) {
      qs.push_back(tail_[j]);
      rs.push_back(tail_[j] * values_[j]);
    }
    hull_ = IronedCurve::upper_hull(qs, rs);
  }

  Kind kind_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double n_param_ = 0.0;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> tail_;
  IronedCurve hull_;
};

}  // namespace rmmb
