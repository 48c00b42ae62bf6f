#include <catch_amalgamated.hpp>

#include "ralloc/generators.hpp"
#include "ralloc/json_io.hpp"
#include "ralloc/randproc.hpp"

using namespace ralloc;
using Catch::Approx;

namespace {

std::vector<double> increasing_times(StreamRng& rng, std::size_t T, double gap) {
  std::vector<double> s;
  double t = 0;
  for (std::size_t k = 0; k < T; ++k) {
    t += 1e-3 + gap * rng.uniform();
    s.push_back(t);
  }
  return s;
}

UsageDistribution pick(StreamRng& rng) {
  switch (int(rng.uniform() * 6)) {
    case 0: return Deterministic{0.2 + 2 * rng.uniform()};
    case 1: return TwoPointInf{0.5 + rng.uniform(), 0.2 + 0.8 * rng.uniform()};
    case 2: return Exponential{0.3 + 2 * rng.uniform()};
    case 3: return Uniform{0.0, 0.5 + 2 * rng.uniform()};
    case 4: return ZeroOrInf{rng.uniform()};
    default: return MixtureWithInf{0.5 + 0.5 * rng.uniform(), WeibullIfr{1.0, 1.5}};
  }
}

}  // namespace

TEST_CASE("fluid process examples") {
  auto a = fluid_process({Deterministic{1.0}, {0, 0.5, 1.5}, {1, 1, 1}});
  CHECK(a.eta == std::vector<double>{1, 0, 1});
  CHECK(a.reward == 2.0);

  auto b = fluid_process({TwoPointInf{1.0, 0.5}, {0, 2}, {1, 1}});
  CHECK(b.eta[0] == 1.0);
  CHECK(b.eta[1] == Approx(0.5));
  CHECK(b.reward == Approx(1.5));

  auto c = fluid_process({Exponential{1.0}, {0, 1, 2, 3}, {0, 0, 0, 0}});
  CHECK(c.eta == std::vector<double>(4, 1.0));
  CHECK(c.reward == 0.0);

  // instant return: a zero-length use is back for the next arrival
  auto z = fluid_process({ZeroOrInf{1.0}, {0, 1, 2}, {1, 1, 1}});
  CHECK(z.eta == std::vector<double>(3, 1.0));
  auto h = fluid_process({ZeroOrInf{0.5}, {0, 1, 2}, {1, 1, 1}});
  CHECK(h.reward == Approx(1.75));
}

TEST_CASE("process simulation examples") {
  auto a = simulate_process({Deterministic{1.0}, {0, 0.5, 1.5}, {1, 1, 1}}, 3, 1000);
  CHECK(a.reward.mean == 2.0);
  CHECK(a.reward.se == 0.0);
  auto b = simulate_process({TwoPointInf{1.0, 0.5}, {0, 2}, {1, 1}}, 4, 100000);
  CHECK(b.reward.mean == Approx(1.5).margin(0.005));
  auto e = simulate_process({Exponential{1.0}, {}, {}}, 4, 10);
  CHECK(e.reward.mean == 0.0);
  CHECK_THROWS_AS(simulate_process({Exponential{1.0}, {0}, {1}}, 4, 0), InvalidArgument);
}

TEST_CASE("simulated availability matches the fluid recursion") {
  StreamRng rng(31, StreamPurpose::generator, 0, 0);
  const std::size_t N = 20000;
  for (int rep = 0; rep < 12; ++rep) {
    ProcessSpec s{pick(rng), increasing_times(rng, 25, 0.6), {}};
    for (std::size_t t = 0; t < s.times.size(); ++t) s.probs.push_back(rng.uniform());
    auto fl = fluid_process(s);
    auto mc = simulate_process(s, 100 + std::uint64_t(rep), N);
    INFO(s.F.type_name());
    for (std::size_t t = 0; t < s.times.size(); ++t) {
      double eta = fl.eta[t];
      double se = std::sqrt(std::max(eta * (1 - eta), 1e-12) / double(N));
      CHECK(std::abs(mc.availability[t] - eta) <= 4 * se + 1e-12);
    }
  }
}

TEST_CASE("availability stays in the unit interval") {
  StreamRng rng(32, StreamPurpose::generator, 0, 0);
  for (int rep = 0; rep < 100; ++rep) {
    ProcessSpec s{pick(rng), increasing_times(rng, 60, 0.4), {}};
    for (std::size_t t = 0; t < s.times.size(); ++t) s.probs.push_back(rng.uniform());
    for (double e : fluid_process(s).eta) {
      CHECK(e >= -1e-12);
      CHECK(e <= 1 + 1e-12);
    }
  }
}

TEST_CASE("zero probability arrivals leave the reward unchanged") {
  StreamRng rng(33, StreamPurpose::generator, 0, 0);
  for (int rep = 0; rep < 50; ++rep) {
    ProcessSpec s{pick(rng), increasing_times(rng, 30, 0.5), {}};
    for (std::size_t t = 0; t < s.times.size(); ++t) s.probs.push_back(rng.uniform());
    ProcessSpec ins{s.F, {}, {}};
    for (std::size_t t = 0; t < s.times.size(); ++t) {
      ins.times.push_back(s.times[t]);
      ins.probs.push_back(s.probs[t]);
      double gap = t + 1 < s.times.size() ? s.times[t + 1] - s.times[t] : 1.0;
      ins.times.push_back(s.times[t] + gap * 0.5);
      ins.probs.push_back(0.0);
    }
    CHECK(fluid_process(ins).reward == Approx(fluid_process(s).reward).margin(1e-12));
  }
}

TEST_CASE("monotonicity") {
  UsageDistribution F = Exponential{1.0};
  std::vector<double> s = {0, 1, 2};
  std::vector<double> p = {0.3, 0.9, 0.5};
  CHECK(check_monotonicity(F, s, {0, 0, 0}, p));
  CHECK(check_monotonicity(F, s, p, p));
  CHECK_THROWS_AS(check_monotonicity(F, s, {1, 0, 0}, p), InvalidArgument);

  StreamRng rng(34, StreamPurpose::generator, 0, 0);
  for (int rep = 0; rep < 100; ++rep) {
    auto G = pick(rng);
    auto times = increasing_times(rng, 40, 0.5);
    std::vector<double> hi, lo;
    for (std::size_t t = 0; t < times.size(); ++t) {
      hi.push_back(rng.uniform());
      lo.push_back(0.5 * hi.back());
    }
    CHECK(check_monotonicity(G, times, lo, hi));
  }
}

TEST_CASE("zero point augmentation") {
  ProcessSpec none{Exponential{1.0}, {0, 1, 2}, {0.5, 0.5, 0.5}};
  CHECK(check_zero_point_augmentation(none));
  ProcessSpec busy{Deterministic{10.0}, {}, {}};
  for (int k = 0; k < 8; ++k) {
    busy.times.push_back(k);
    busy.probs.push_back(1.0);
  }
  auto fl = fluid_process(busy);
  for (std::size_t t = 1; t < busy.times.size(); ++t) CHECK(fl.eta[t] == 0.0);
  CHECK(check_zero_point_augmentation(busy));

  StreamRng rng(35, StreamPurpose::generator, 0, 0);
  int with_zero = 0;
  for (int rep = 0; rep < 100; ++rep) {
    // dense prefix under a long deterministic use forces eta = 0 points
    double d = 1 + 2 * rng.uniform();
    ProcessSpec s{Deterministic{d}, {}, {}};
    double t = 0;
    for (int k = 0; k < 30; ++k) {
      s.times.push_back(t);
      t += k < 10 ? 0.05 : 0.3 * rng.uniform() + 1e-3;
      s.probs.push_back(k == 0 ? 1.0 : rng.uniform() * (k < 10 ? 0.0 : 1.0));
    }
    auto e = fluid_process(s).eta;
    if (std::any_of(e.begin(), e.end(), [](double x) { return x <= 1e-12; })) ++with_zero;
    CHECK(check_zero_point_augmentation(s));
  }
  CHECK(with_zero == 100);
}

TEST_CASE("process spec errors") {
  CHECK_THROWS_AS(fluid_process({Exponential{1.0}, {0, 0}, {1, 1}}), InvalidArgument);
  CHECK_THROWS_AS(fluid_process({Exponential{1.0}, {1, 0}, {1, 1}}), InvalidArgument);
  CHECK_THROWS_AS(fluid_process({Exponential{1.0}, {0, 1}, {1.5, 1}}), InvalidArgument);
  CHECK_THROWS_AS(fluid_process({Exponential{1.0}, {0, 1}, {1}}), InvalidArgument);
}

TEST_CASE("process spec json") {
  auto s = process_spec_from_json(
      Json::parse(R"({"F":{"type":"deterministic","d":1},"times":[0,0.5,1.5],"probs":[1,1,1]})"));
  CHECK(fluid_process(s).eta == std::vector<double>{1, 0, 1});
  CHECK(process_spec_from_json(to_json(s)).times == s.times);
  CHECK_THROWS_AS(process_spec_from_json(Json::parse(R"({"F":{"type":"deterministic","d":1}})")), ParseError);
}
