#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "qcd/integrate.hpp"
#include "qcd/numerics.hpp"

using namespace qcd;
using doctest::Approx;

TEST_CASE("normal cdf values and symmetry") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(1.0) == Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(std_normal_cdf(-1.2345) == Approx(1.0 - std_normal_cdf(1.2345)).epsilon(1e-14));
  CHECK(std_normal_cdf(-10.0) > 0.0);
  CHECK(std_normal_cdf(-10.0) == Approx(7.6198530241605e-24).epsilon(1e-10));
  double prev = 0.0;
  for (double x = -9.0; x <= 9.0; x += 0.01) {
    const double c = std_normal_cdf(x);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("normal quantile") {
  CHECK(std_normal_quantile(0.5) == Approx(0.0).epsilon(1e-15));
  CHECK(std_normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
  CHECK(std_normal_quantile(0.8413447460685429) == Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(std_normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(1.0), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(-0.1), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(NAN), DomainError);

  for (double x = -6.0; x <= 6.0; x += 0.05) {
    CHECK(std::abs(std_normal_quantile(std_normal_cdf(x)) - x) < 1e-8);
  }
  for (double p : {1e-12, 1e-6, 0.02, 0.3, 0.7, 0.98, 1 - 1e-6}) {
    CHECK(std_normal_cdf(std_normal_quantile(p)) == Approx(p).epsilon(1e-9));
  }
  double prev = -INFINITY;
  for (int i = 1; i < 1000; ++i) {
    const double q = std_normal_quantile(i / 1000.0);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("hermite rule small orders") {
  CHECK_THROWS_AS(hermite_rule(0), DomainError);
  const auto h1 = hermite_rule(1);
  REQUIRE(h1.nodes.size() == 1);
  CHECK(h1.nodes[0] == 0.0);
  CHECK(h1.weights[0] == Approx(1.0));

  const auto h2 = hermite_rule(2);
  CHECK(h2.nodes[0] == Approx(-1.0).epsilon(1e-14));
  CHECK(h2.nodes[1] == Approx(1.0).epsilon(1e-14));
  CHECK(h2.weights[0] == Approx(0.5).epsilon(1e-14));
  CHECK(h2.weights[1] == Approx(0.5).epsilon(1e-14));

  const auto h3 = hermite_rule(3);
  CHECK(h3.nodes[0] == Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(h3.nodes[1] == 0.0);
  CHECK(h3.nodes[2] == Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(h3.weights[0] == Approx(1.0 / 6).epsilon(1e-14));
  CHECK(h3.weights[1] == Approx(2.0 / 3).epsilon(1e-14));
  CHECK(h3.weights[2] == Approx(1.0 / 6).epsilon(1e-14));
}

namespace {

// E[U^k], U ~ N(0,1).
double normal_moment(int k) {
  if (k % 2) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 0; j -= 2) m *= j;
  return m;
}

}  // namespace

TEST_CASE("hermite rule reproduces normal moments") {
  for (int n = 1; n <= 50; ++n) {
    const auto h = hermite_rule(n);
    double wsum = 0.0;
    for (double w : h.weights) wsum += w;
    CHECK(wsum == Approx(1.0).epsilon(1e-12));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += h.weights[i] * std::pow(h.nodes[i], k);
      const double exact = normal_moment(k);
      if (exact == 0.0) {
        // Odd moments vanish; compare against the scale of the terms.
        double scale = 0.0;
        for (int i = 0; i < n; ++i) scale += h.weights[i] * std::pow(std::abs(h.nodes[i]), k);
        CHECK(std::abs(acc) <= 1e-10 * std::max(1.0, scale));
      } else {
        CHECK(std::abs(acc - exact) <= 1e-10 * exact);
      }
    }
  }
}

TEST_CASE("hermite rule at order 200 is sorted, symmetric and normalized") {
  const auto h = hermite_rule(200);
  double wsum = 0.0;
  for (int i = 0; i < 200; ++i) {
    wsum += h.weights[i];
    CHECK(h.weights[i] > 0.0);
    if (i) CHECK(h.nodes[i] > h.nodes[i - 1]);
    CHECK(h.nodes[i] == Approx(-h.nodes[199 - i]).epsilon(1e-12));
  }
  CHECK(wsum == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(hermite_rule(201), DomainError);
}

TEST_CASE("lognormal quantile") {
  CHECK(lognormal_quantile(0.5, 0.0, 1.0) == Approx(1.0));
  CHECK(lognormal_quantile(0.5, 1.0, 2.0) == Approx(std::exp(1.0)));
  CHECK(lognormal_quantile(2.0 / 3, 0.0, 1.0) == Approx(1.5383).epsilon(1e-4));
  CHECK_THROWS_AS(lognormal_quantile(1.0, 0.0, 1.0), DomainError);

  const double p = 0.3, mu = 0.4, s = 1.3, h = 1e-6;
  const Dual dm = lognormal_quantile(p, Dual::variable(mu), Dual(s));
  const Dual ds = lognormal_quantile(p, Dual(mu), Dual::variable(s));
  const double fdm =
      (lognormal_quantile(p, mu + h, s) - lognormal_quantile(p, mu - h, s)) / (2 * h);
  const double fds =
      (lognormal_quantile(p, mu, s + h) - lognormal_quantile(p, mu, s - h)) / (2 * h);
  CHECK(dm.derivative == Approx(fdm).epsilon(1e-7));
  CHECK(ds.derivative == Approx(fds).epsilon(1e-7));
}

TEST_CASE("dual derivatives match central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  const double h = 1e-6;
  const auto check = [h](auto f, double x) {
    const Dual d = f(Dual::variable(x));
    const double fd = (value_of(f(Dual(x + h))) - value_of(f(Dual(x - h)))) / (2 * h);
    CHECK(d.derivative == Approx(fd).epsilon(1e-6));
  };
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    const double y = u(rng);
    check([](Dual t) { return exp(t); }, x);
    check([](Dual t) { return log(t); }, x);
    check([](Dual t) { return sigmoid(t); }, x - 1.5);
    check([](Dual t) { return t * t; }, x);
    check([y](Dual t) { return t * Dual(y); }, x);
  }
}

TEST_CASE("dual edge behaviour") {
  CHECK(sigmoid(Dual(800.0)).value == 1.0);
  CHECK(sigmoid(Dual(-800.0)).value == 0.0);
  CHECK(std::isfinite(sigmoid(Dual::variable(-800.0)).derivative));
  CHECK(step(Dual::variable(0.3)).derivative == 0.0);
  CHECK(step(Dual::variable(0.3)).value == 1.0);
  CHECK(step(Dual::variable(-0.3)).value == 0.0);
}

TEST_CASE("log factorial and poisson pmf") {
  for (long x : {0L, 1L, 5L, 100L, 255L, 256L, 257L, 1000L, 100000L}) {
    CHECK(log_factorial(x) == Approx(std::lgamma(x + 1.0)).epsilon(1e-13));
  }
  CHECK(std::exp(poisson_log_pmf(0, 0.5)) == Approx(std::exp(-0.5)));
  CHECK(std::exp(poisson_log_pmf(3, 2.0)) == Approx(8.0 / 6 * std::exp(-2.0)));
  CHECK(poisson_log_pmf(0, 0.0) == 0.0);
  CHECK(poisson_log_pmf(2, 0.0) == -INFINITY);
}

TEST_CASE("log-sum-exp") {
  std::vector<double> a{std::log(0.25), std::log(0.75)};
  CHECK(log_sum_exp(a) == Approx(0.0));
  std::vector<double> b{-1000.0, -1000.0};
  CHECK(log_sum_exp(b) == Approx(-1000.0 + std::log(2.0)));
  std::vector<double> c{-INFINITY, -INFINITY};
  CHECK(log_sum_exp(c) == -INFINITY);
  std::vector<double> d;
  CHECK(log_sum_exp(d) == -INFINITY);
}

TEST_CASE("adaptive simpson") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
        Approx(2.0).epsilon(1e-11));
  CHECK(adaptive_simpson([](double x) { return std_normal_pdf(x); }, -12.0, 12.0, 1e-13) ==
        Approx(1.0).epsilon(1e-12));
  // A derivative rides along with the value.
  const Dual lam = Dual::variable(0.7);
  const Dual v = adaptive_simpson([lam](double x) { return exp(lam * Dual(x)); }, 0.0, 1.0, 1e-12);
  CHECK(v.value == Approx((std::exp(0.7) - 1) / 0.7).epsilon(1e-11));
  CHECK(v.derivative ==
        Approx((std::exp(0.7) * 0.7 - (std::exp(0.7) - 1)) / 0.49).epsilon(1e-10));
}
