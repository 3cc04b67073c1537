#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "daaf/errors.hpp"

namespace daaf {

enum class DelayKind {
  constant,
  uniform_int,
  geometric,
  discretized_exponential,
  discretized_truncated_normal,
};

inline std::string_view to_string(DelayKind kind) {
  switch (kind) {
    case DelayKind::constant: return "constant";
    case DelayKind::uniform_int: return "uniform-int";
    case DelayKind::geometric: return "geometric";
    case DelayKind::discretized_exponential: return "discretized-exponential";
    case DelayKind::discretized_truncated_normal: return "discretized-truncated-normal";
  }
  return "unknown";
}

inline DelayKind parse_delay_kind(std::string_view name) {
  for (auto kind : {DelayKind::constant, DelayKind::uniform_int, DelayKind::geometric,
                    DelayKind::discretized_exponential,
                    DelayKind::discretized_truncated_normal}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown delay kind '" + std::string(name) + "'");
}

struct DelayMoments {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<std::int64_t> bound;
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace detail

/// A delay distribution on {0, 1, 2, ...}, shared by all arms.
///
/// Continuous families are discretized by ceiling, so a continuous draw x lands
/// in round ceil(x). The truncated normal is N(mu, sigma^2) conditioned on x >= 0.
class DelayModel {
 public:
  static DelayModel constant(std::int64_t c) {
    if (c < 0) throw ConfigError("constant delay must be >= 0");
    return DelayModel(DelayKind::constant, static_cast<double>(c), 0.0);
  }

  /// Uniform on {0, ..., d}.
  static DelayModel uniform_int(std::int64_t d) {
    if (d < 0) throw ConfigError("uniform-int delay bound must be >= 0");
    return DelayModel(DelayKind::uniform_int, static_cast<double>(d), 0.0);
  }

  /// Number of failures before the first success, success probability p.
  static DelayModel geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("geometric delay requires p in (0, 1]");
    return DelayModel(DelayKind::geometric, p, 0.0);
  }

  static DelayModel discretized_exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
      throw ConfigError("discretized-exponential delay requires rate > 0");
    return DelayModel(DelayKind::discretized_exponential, rate, 0.0);
  }

  static DelayModel discretized_truncated_normal(double mu, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw ConfigError("discretized-truncated-normal delay requires sigma > 0");
    if (!std::isfinite(mu)) throw ConfigError("discretized-truncated-normal mu must be finite");
    // Rejection sampling accepts with probability Phi(mu/sigma).
    if (mu < -4.0 * sigma)
      throw ConfigError("discretized-truncated-normal requires mu >= -4 sigma");
    return DelayModel(DelayKind::discretized_truncated_normal, mu, sigma);
  }

  DelayKind kind() const { return kind_; }

  /// First parameter: c, d, p, rate or mu depending on the kind.
  double first_parameter() const { return a_; }
  /// Second parameter: sigma for the truncated normal, unused otherwise.
  double second_parameter() const { return b_; }

  template <class Engine>
  std::int64_t sample(Engine& rng) const {
    switch (kind_) {
      case DelayKind::constant:
        return static_cast<std::int64_t>(a_);
      case DelayKind::uniform_int:
        return std::uniform_int_distribution<std::int64_t>(0, static_cast<std::int64_t>(a_))(rng);
      case DelayKind::geometric:
        if (a_ == 1.0) return 0;
        return std::geometric_distribution<std::int64_t>(a_)(rng);
      case DelayKind::discretized_exponential:
        return static_cast<std::int64_t>(std::ceil(std::exponential_distribution<double>(a_)(rng)));
      case DelayKind::discretized_truncated_normal: {
        std::normal_distribution<double> normal(a_, b_);
        double x = normal(rng);
        while (x < 0.0) x = normal(rng);
        return static_cast<std::int64_t>(std::ceil(x));
      }
    }
    return 0;
  }

  /// P(delay = k).
  double probability(std::int64_t k) const {
    if (k < 0) return 0.0;
    switch (kind_) {
      case DelayKind::constant:
        return k == static_cast<std::int64_t>(a_) ? 1.0 : 0.0;
      case DelayKind::uniform_int:
        return k <= static_cast<std::int64_t>(a_) ? 1.0 / (a_ + 1.0) : 0.0;
      case DelayKind::geometric:
        return a_ * std::pow(1.0 - a_, static_cast<double>(k));
      case DelayKind::discretized_exponential:
        if (k == 0) return 0.0;
        return std::exp(-a_ * static_cast<double>(k - 1)) * -std::expm1(-a_);
      case DelayKind::discretized_truncated_normal: {
        if (k == 0) return 0.0;
        const double lo = (static_cast<double>(k - 1) - a_) / b_;
        const double hi = (static_cast<double>(k) - a_) / b_;
        const double mass = lo > 0.0 ? detail::normal_sf(lo) - detail::normal_sf(hi)
                                     : detail::normal_cdf(hi) - detail::normal_cdf(lo);
        return mass / truncation_mass();
      }
    }
    return 0.0;
  }

  /// P(delay > k).
  double tail(std::int64_t k) const {
    if (k < 0) return 1.0;
    switch (kind_) {
      case DelayKind::constant:
        return k < static_cast<std::int64_t>(a_) ? 1.0 : 0.0;
      case DelayKind::uniform_int:
        return k < static_cast<std::int64_t>(a_) ? (a_ - static_cast<double>(k)) / (a_ + 1.0)
                                                 : 0.0;
      case DelayKind::geometric:
        return std::pow(1.0 - a_, static_cast<double>(k + 1));
      case DelayKind::discretized_exponential:
        return std::exp(-a_ * static_cast<double>(k));
      case DelayKind::discretized_truncated_normal:
        return detail::normal_sf((static_cast<double>(k) - a_) / b_) / truncation_mass();
    }
    return 0.0;
  }

  DelayMoments moments() const {
    switch (kind_) {
      case DelayKind::constant:
        return {a_, 0.0, static_cast<std::int64_t>(a_)};
      case DelayKind::uniform_int:
        return {a_ / 2.0, a_ * (a_ + 2.0) / 12.0, static_cast<std::int64_t>(a_)};
      case DelayKind::geometric:
        return {(1.0 - a_) / a_, (1.0 - a_) / (a_ * a_), std::nullopt};
      case DelayKind::discretized_exponential:
      case DelayKind::discretized_truncated_normal:
        return summed_moments();
    }
    return {};
  }

  /// Same family with its location moved: c, d/2, (1-p)/p or 1/rate become
  /// `location` (rounded for the integer families); the truncated normal keeps
  /// sigma and takes mu = location.
  DelayModel relocated(double location) const {
    if (!(location >= 0.0) || !std::isfinite(location))
      throw ConfigError("delay location must be finite and >= 0");
    switch (kind_) {
      case DelayKind::constant:
        return constant(std::llround(location));
      case DelayKind::uniform_int:
        return uniform_int(std::llround(2.0 * location));
      case DelayKind::geometric:
        return geometric(1.0 / (1.0 + location));
      case DelayKind::discretized_exponential:
        if (location == 0.0) throw ConfigError("discretized-exponential cannot have mean 0");
        return discretized_exponential(1.0 / location);
      case DelayKind::discretized_truncated_normal:
        return discretized_truncated_normal(location, b_);
    }
    return *this;
  }

  double mean() const { return moments().mean; }
  double variance() const { return moments().variance; }
  std::optional<std::int64_t> bound() const { return moments().bound; }

  std::string describe() const {
    std::ostringstream out;
    out.precision(17);
    out << to_string(kind_) << '(';
    switch (kind_) {
      case DelayKind::constant:
      case DelayKind::uniform_int:
        out << static_cast<std::int64_t>(a_);
        break;
      case DelayKind::geometric:
      case DelayKind::discretized_exponential:
        out << a_;
        break;
      case DelayKind::discretized_truncated_normal:
        out << a_ << ',' << b_;
        break;
    }
    out << ')';
    return out.str();
  }

  friend bool operator==(const DelayModel&, const DelayModel&) = default;

 private:
  DelayModel(DelayKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  double truncation_mass() const { return detail::normal_cdf(a_ / b_); }

  // Sums k P(k) and k^2 P(k) until the residual probability is below 1e-12 and
  // small enough relative to k^2 that the neglected second moment is < 1e-10.
  DelayMoments summed_moments() const {
    constexpr std::int64_t kMaxTerms = 200'000'000;
    long double first = 0.0L;
    long double second = 0.0L;
    for (std::int64_t k = 0; k < kMaxTerms; ++k) {
      const long double p = probability(k);
      first += p * static_cast<long double>(k);
      second += p * static_cast<long double>(k) * static_cast<long double>(k);
      const double rest = tail(k);
      const double kk = static_cast<double>(k + 1);
      if (rest < 1e-12 && rest * kk * kk < 1e-10) {
        const long double variance = second - first * first;
        return {static_cast<double>(first), static_cast<double>(variance), std::nullopt};
      }
    }
    throw ConfigError("delay distribution " + describe() + " is too heavy-tailed to summarize");
  }

  DelayKind kind_;
  double a_;
  double b_;
};

}  // namespace daaf
