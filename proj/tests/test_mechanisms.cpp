#include <doctest.h>

#include <cmath>

#include "qpdlab/mechanisms.hpp"

using namespace qpdlab;

TEST_SUITE("mechanisms") {

TEST_CASE("laplace noise vanishes as epsilon grows") {
  NoiseSpec spec;
  spec.kind = MechanismKind::laplace;
  spec.epsilon = 1e12;
  Rng rng(1);
  const auto r = laplace_perturb(0.37, spec, rng);
  CHECK(r.value == doctest::Approx(0.37).epsilon(1e-9));
  CHECK(r.epsilon_spent == spec.epsilon);
}

TEST_CASE("laplace empirical mean and absolute deviation") {
  NoiseSpec spec;
  spec.kind = MechanismKind::laplace;
  spec.epsilon = 1.0;
  Rng rng(2);
  double sum = 0.0, abs_sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = laplace_perturb(0.5, spec, rng).value;
    sum += v;
    abs_sum += std::abs(v - 0.5);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.04));    // +- 0.02 absolute
  CHECK(abs_sum / n == doctest::Approx(1.0).epsilon(0.03));  // E|noise| = sens/eps
}

TEST_CASE("gaussian empirical variance and normality") {
  NoiseSpec spec;
  spec.kind = MechanismKind::gaussian;
  spec.epsilon = 2.0;  // sigma = 0.5
  Rng rng(3);
  const int n = 100000;
  std::vector<double> noise(n);
  double sum = 0.0;
  for (auto& v : noise) {
    v = gaussian_perturb(0.0, spec, rng).value;
    sum += v;
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : noise) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1);
  CHECK(var == doctest::Approx(0.25).epsilon(0.03));

  // KS against the fitted normal; critical value at alpha=0.01 is 1.63/sqrt(n)
  std::sort(noise.begin(), noise.end());
  const double sd = std::sqrt(var);
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = 0.5 * std::erfc(-(noise[i] - mean) / (sd * std::sqrt(2.0)));
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("laplace and gaussian are shift-equivariant under matched seeds") {
  NoiseSpec spec;
  spec.kind = MechanismKind::laplace;
  spec.epsilon = 0.7;
  for (int i = 0; i < 20; ++i) {
    Rng r1(900 + i), r2(900 + i);
    const double base = laplace_perturb(0.2, spec, r1).value;
    const double shifted = laplace_perturb(0.2 + 0.35, spec, r2).value;
    CHECK(shifted - base == doctest::Approx(0.35).epsilon(1e-12));
  }
  spec.kind = MechanismKind::gaussian;
  for (int i = 0; i < 20; ++i) {
    Rng r1(950 + i), r2(950 + i);
    const double base = gaussian_perturb(0.2, spec, r1).value;
    const double shifted = gaussian_perturb(0.2 + 0.35, spec, r2).value;
    CHECK(shifted - base == doctest::Approx(0.35).epsilon(1e-12));
  }
}

TEST_CASE("clamping keeps responses in the unit interval") {
  NoiseSpec spec;
  spec.kind = MechanismKind::laplace;
  spec.epsilon = 0.1;  // large noise
  spec.clamp = true;
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const double v = laplace_perturb(0.5, spec, rng).value;
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("bdpl keep probability formula") {
  // eps=1: 1/2 + sqrt(e^2-1)/(2+2e)
  const double expected = 0.5 + std::sqrt(std::exp(2.0) - 1.0) / (2.0 + 2.0 * std::exp(1.0));
  CHECK(bdpl_keep_probability(1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.8399).epsilon(1e-3));
  // eps -> 0+: pure coin flip
  CHECK(bdpl_keep_probability(1e-9) == doctest::Approx(0.5).epsilon(1e-4));
  // monotone increasing on a grid, bounded in [1/2, 1)
  double prev = 0.5;
  for (double eps = 0.1; eps <= 5.0; eps += 0.1) {
    const double k = bdpl_keep_probability(eps);
    CHECK(k > prev);
    CHECK(k < 1.0);
    prev = k;
  }
  CHECK_THROWS_AS(bdpl_keep_probability(0.0), std::invalid_argument);
}

TEST_CASE("bdpl empirical keep rate at eps=1") {
  NoiseSpec spec;
  spec.kind = MechanismKind::bdpl;
  spec.epsilon = 1.0;
  spec.delta_zone = 0.125;
  Rng rng(5);
  int kept = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto r = bdpl_perturb(1, 0.52, spec, rng);  // in-zone
    CHECK(r.epsilon_spent == 1.0);
    kept += r.value == 1.0 ? 1 : 0;
  }
  CHECK(static_cast<double>(kept) / n ==
        doctest::Approx(bdpl_keep_probability(1.0)).epsilon(0.012));
}

TEST_CASE("bdpl leaves out-of-zone labels untouched") {
  NoiseSpec spec;
  spec.kind = MechanismKind::bdpl;
  spec.epsilon = 1.0;
  spec.delta_zone = 0.125;
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const auto r = bdpl_perturb(1, 0.9, spec, rng);
    CHECK(r.value == 1.0);
    CHECK(r.epsilon_spent == 0.0);
    CHECK_FALSE(r.in_zone);
  }
  spec.epsilon = 0.0;
  CHECK_THROWS_AS(bdpl_perturb(1, 0.52, spec, rng), std::invalid_argument);
  spec.epsilon = 1.0;
  CHECK_THROWS_AS(bdpl_perturb(2, 0.52, spec, rng), std::invalid_argument);
}

TEST_CASE("rounding is half away from zero") {
  CHECK(round_confidence(0.8367, 2).value == doctest::Approx(0.84).epsilon(1e-12));
  CHECK(round_confidence(0.5, 2).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(round_confidence(0.005, 2).value == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(round_confidence(0.8367, 0).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(round_confidence(0.42, 5).value == doctest::Approx(0.42).epsilon(1e-12));
  CHECK(round_confidence(0.1, 2).epsilon_spent == 0.0);
  CHECK_THROWS_AS(round_confidence(0.5, -1), std::invalid_argument);
}

TEST_CASE("noise spec json parsing") {
  const NoiseSpec s =
      NoiseSpec::from_json_text(R"({"kind":"bdpl","epsilon":1.0,"delta_zone":0.125})");
  CHECK(s.kind == MechanismKind::bdpl);
  CHECK(s.epsilon == 1.0);
  CHECK(s.delta_zone == 0.125);
  CHECK_THROWS(NoiseSpec::from_json_text(R"({"kind":"bogus"})"));
  CHECK_THROWS(NoiseSpec::from_json_text(R"({"kind":"bdpl","delta_zone":0.9})"));
}

TEST_CASE("epsilon must be positive for additive mechanisms") {
  NoiseSpec spec;
  spec.kind = MechanismKind::laplace;
  spec.epsilon = 0.0;
  Rng rng(7);
  CHECK_THROWS_AS(laplace_perturb(0.5, spec, rng), std::invalid_argument);
  spec.kind = MechanismKind::gaussian;
  CHECK_THROWS_AS(gaussian_perturb(0.5, spec, rng), std::invalid_argument);
}

}  // TEST_SUITE
