#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace ralloc {

// A usage duration: finite nonnegative real, or the distinguished +inf.
class Duration {
 public:
  static Duration finite(double d) { return Duration(d, false); }
  static Duration infinite() { return Duration(0.0, true); }

  bool is_infinite() const { return inf_; }
  bool is_finite() const { return !inf_; }
  double value() const { return inf_ ? std::numeric_limits<double>::infinity() : d_; }

  bool operator==(const Duration& o) const {
    return inf_ == o.inf_ && (inf_ || d_ == o.d_);
  }

 private:
  Duration(double d, bool inf) : d_(d), inf_(inf) {}
  double d_;
  bool inf_;
};

struct Deterministic { double d = 0; bool operator==(const Deterministic&) const = default; };
struct TwoPointInf { double d = 0; double p = 0; bool operator==(const TwoPointInf&) const = default; };
// p is the probability of duration 0; otherwise the unit never comes back
struct ZeroOrInf { double p = 0; bool operator==(const ZeroOrInf&) const = default; };
struct Exponential { double rate = 1; bool operator==(const Exponential&) const = default; };
struct Uniform { double lo = 0, hi = 1; bool operator==(const Uniform&) const = default; };
struct WeibullIfr { double scale = 1, shape = 1; bool operator==(const WeibullIfr&) const = default; };
struct NonReusable { bool operator==(const NonReusable&) const = default; };

using FiniteUsage = std::variant<Deterministic, Exponential, Uniform, WeibullIfr>;

struct MixtureWithInf {
  double p_finite = 1;
  FiniteUsage base;
  bool operator==(const MixtureWithInf&) const = default;
};

namespace detail {

inline double finite_cdf(const FiniteUsage& f, double t) {
  if (t < 0) return 0.0;
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return t >= v.d ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -std::expm1(-v.rate * t);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          if (t <= v.lo) return 0.0;
          if (t >= v.hi) return 1.0;
          return (t - v.lo) / (v.hi - v.lo);
        } else {
          return -std::expm1(-std::pow(t / v.scale, v.shape));
        }
      },
      f);
}

inline double finite_sample(const FiniteUsage& f, double u) {
  return std::visit(
      [u](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return v.d;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log(u) / v.rate;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return v.lo + u * (v.hi - v.lo);
        } else {
          return v.scale * std::pow(-std::log(u), 1.0 / v.shape);
        }
      },
      f);
}

inline void check_finite_usage(const FiniteUsage& f) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          if (!(v.d >= 0) || !std::isfinite(v.d)) throw InvalidArgument("deterministic d must be >= 0");
        } else if constexpr (std::is_same_v<T, Exponential>) {
          if (!(v.rate > 0) || !std::isfinite(v.rate)) throw InvalidArgument("exponential rate must be > 0");
        } else if constexpr (std::is_same_v<T, Uniform>) {
          if (!(v.lo >= 0 && v.lo < v.hi) || !std::isfinite(v.hi))
            throw InvalidArgument("uniform needs 0 <= lo < hi");
        } else {
          if (!(v.scale > 0) || !(v.shape >= 1) || !std::isfinite(v.scale) || !std::isfinite(v.shape))
            throw InvalidArgument("weibull needs scale > 0, shape >= 1");
        }
      },
      f);
}

inline bool prob_ok(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace detail

// (resource id, unit rank, use counter)
struct DurationStreamKey {
  std::uint32_t resource = 0;
  std::uint32_t unit = 0;
  std::uint32_t use = 0;
};

class UsageDistribution {
 public:
  using Variant = std::variant<Deterministic, TwoPointInf, ZeroOrInf, Exponential, Uniform,
                               WeibullIfr, MixtureWithInf, NonReusable>;

  UsageDistribution() : v_(NonReusable{}) {}
  template <class T, class = std::enable_if_t<std::is_constructible_v<Variant, T>>>
  UsageDistribution(T v) : v_(std::move(v)) {  // NOLINT: implicit on purpose
    check();
  }

  const Variant& variant() const { return v_; }
  template <class T>
  bool is() const { return std::holds_alternative<T>(v_); }

  double cdf(double t) const {
    if (t < 0) return 0.0;
    return std::visit(
        [t](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, TwoPointInf>) {
            return t >= v.d ? v.p : 0.0;
          } else if constexpr (std::is_same_v<T, ZeroOrInf>) {
            return v.p;
          } else if constexpr (std::is_same_v<T, MixtureWithInf>) {
            return v.p_finite * detail::finite_cdf(v.base, t);
          } else if constexpr (std::is_same_v<T, NonReusable>) {
            return 0.0;
          } else {
            return detail::finite_cdf(FiniteUsage(v), t);
          }
        },
        v_);
  }

  double mass_at_inf() const {
    return std::visit(
        [](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, TwoPointInf> || std::is_same_v<T, ZeroOrInf>) {
            return 1.0 - v.p;
          } else if constexpr (std::is_same_v<T, MixtureWithInf>) {
            return 1.0 - v.p_finite;
          } else if constexpr (std::is_same_v<T, NonReusable>) {
            return 1.0;
          } else {
            return 0.0;
          }
        },
        v_);
  }

  // total probability of a finite duration, computed directly (no 1 - (1 - p) rounding)
  double finite_mass() const {
    return std::visit(
        [](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, TwoPointInf> || std::is_same_v<T, ZeroOrInf>) {
            return v.p;
          } else if constexpr (std::is_same_v<T, MixtureWithInf>) {
            return v.p_finite;
          } else if constexpr (std::is_same_v<T, NonReusable>) {
            return 0.0;
          } else {
            return 1.0;
          }
        },
        v_);
  }

  // Largest finite duration that can occur, when it is bounded.
  // Returns +inf for unbounded finite parts (exponential, weibull).
  double finite_support_max() const {
    return std::visit(
        [](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          constexpr double kInf = std::numeric_limits<double>::infinity();
          if constexpr (std::is_same_v<T, Deterministic> || std::is_same_v<T, TwoPointInf>) {
            return v.d;
          } else if constexpr (std::is_same_v<T, ZeroOrInf> || std::is_same_v<T, NonReusable>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, Uniform>) {
            return v.hi;
          } else if constexpr (std::is_same_v<T, MixtureWithInf>) {
            return UsageDistribution(std::visit([](auto b) { return UsageDistribution(b); }, v.base))
                .finite_support_max();
          } else {
            return kInf;
          }
        },
        v_);
  }

  // Map two uniforms in (0,1) to a duration. The sampler is a pure function of them.
  Duration from_uniforms(double u1, double u2) const {
    return std::visit(
        [u1, u2](const auto& v) -> Duration {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, TwoPointInf>) {
            return u1 < v.p ? Duration::finite(v.d) : Duration::infinite();
          } else if constexpr (std::is_same_v<T, ZeroOrInf>) {
            return u1 < v.p ? Duration::finite(0.0) : Duration::infinite();
          } else if constexpr (std::is_same_v<T, MixtureWithInf>) {
            return u1 < v.p_finite ? Duration::finite(detail::finite_sample(v.base, u2))
                                   : Duration::infinite();
          } else if constexpr (std::is_same_v<T, NonReusable>) {
            return Duration::infinite();
          } else {
            return Duration::finite(detail::finite_sample(FiniteUsage(v), u1));
          }
        },
        v_);
  }

  Duration sample(const DurationStreamKey& key, std::uint64_t seed) const {
    auto u = keyed_uniforms(seed, StreamPurpose::duration, key.resource, key.unit, key.use);
    return from_uniforms(u[0], u[1]);
  }

  // atomic variants with finitely many outcomes
  bool has_finite_support() const {
    if (auto m = std::get_if<MixtureWithInf>(&v_)) return std::holds_alternative<Deterministic>(m->base);
    return is<Deterministic>() || is<TwoPointInf>() || is<ZeroOrInf>() || is<NonReusable>();
  }

  std::vector<std::pair<Duration, double>> outcomes() const {
    if (!has_finite_support()) throw Unsupported("outcomes() needs a finite-support distribution");
    std::vector<std::pair<Duration, double>> out;
    auto add = [&](Duration d, double p) {
      if (p > 0) out.emplace_back(d, p);
    };
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Deterministic>) {
            add(Duration::finite(v.d), 1.0);
          } else if constexpr (std::is_same_v<T, TwoPointInf>) {
            add(Duration::finite(v.d), v.p);
            add(Duration::infinite(), 1.0 - v.p);
          } else if constexpr (std::is_same_v<T, ZeroOrInf>) {
            add(Duration::finite(0.0), v.p);
            add(Duration::infinite(), 1.0 - v.p);
          } else if constexpr (std::is_same_v<T, MixtureWithInf>) {
            add(Duration::finite(std::get<Deterministic>(v.base).d), v.p_finite);
            add(Duration::infinite(), 1.0 - v.p_finite);
          } else if constexpr (std::is_same_v<T, NonReusable>) {
            add(Duration::infinite(), 1.0);
          }
        },
        v_);
    return out;
  }

  // continuous with no atom anywhere, including +inf
  bool is_continuous() const { return is<Exponential>() || is<Uniform>() || is<WeibullIfr>(); }

  double quantile(double q) const {
    if (!(q > 0 && q < 1)) throw InvalidArgument("quantile level must be in (0,1)");
    if (auto e = std::get_if<Exponential>(&v_)) return -std::log1p(-q) / e->rate;
    if (auto u = std::get_if<Uniform>(&v_)) return u->lo + q * (u->hi - u->lo);
    if (auto w = std::get_if<WeibullIfr>(&v_)) return w->scale * std::pow(-std::log1p(-q), 1.0 / w->shape);
    throw Unsupported("quantile defined for continuous variants only");
  }

  std::string_view type_name() const {
    static constexpr std::string_view names[] = {"deterministic", "two_point_inf", "zero_or_inf",
                                                 "exponential",   "uniform",       "weibull",
                                                 "mixture_inf",   "non_reusable"};
    return names[v_.index()];
  }

  bool operator==(const UsageDistribution& o) const { return v_ == o.v_; }

 private:
  void check() const {
    std::visit(
        [](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, TwoPointInf>) {
            if (!(v.d >= 0) || !std::isfinite(v.d) || !detail::prob_ok(v.p))
              throw InvalidArgument("two_point_inf needs d >= 0, p in [0,1]");
          } else if constexpr (std::is_same_v<T, ZeroOrInf>) {
            if (!detail::prob_ok(v.p)) throw InvalidArgument("zero_or_inf needs p in [0,1]");
          } else if constexpr (std::is_same_v<T, MixtureWithInf>) {
            if (!detail::prob_ok(v.p_finite)) throw InvalidArgument("mixture_inf needs p_finite in [0,1]");
            detail::check_finite_usage(v.base);
          } else if constexpr (std::is_same_v<T, NonReusable>) {
          } else {
            detail::check_finite_usage(FiniteUsage(v));
          }
        },
        v_);
  }

  Variant v_;
};

struct LResult {
  double value = 1.0;
  double grid_step = 0.0;
  double argmax = 0.0;
};

// max over x of [F(x + F^{-1}(eps)) - F(x)] / eps on a geometric grid of
// ratio (1 + grid) that runs up to the 1 - 1e-9 quantile; x = 0 is always tried
inline LResult compute_L(const UsageDistribution& dist, double eps, double grid) {
  if (!dist.is_continuous()) throw Unsupported("compute_L needs a continuous distribution without atoms");
  if (!(eps > 0 && eps < 1)) throw InvalidArgument("eps must be in (0,1)");
  if (!(grid > 0)) throw InvalidArgument("grid step must be positive");
  const double shift = dist.quantile(eps);
  const double top = dist.quantile(1.0 - 1e-9);
  auto ratio_at = [&](double x) { return (dist.cdf(x + shift) - dist.cdf(x)) / eps; };
  LResult best{ratio_at(0.0), grid, 0.0};
  double x = top * 1e-9;
  while (x <= top) {
    double r = ratio_at(x);
    if (r > best.value) {
      best.value = r;
      best.argmax = x;
    }
    x *= 1.0 + grid;
  }
  best.value = std::max(best.value, 1.0);
  return best;
}

}  // namespace ralloc
