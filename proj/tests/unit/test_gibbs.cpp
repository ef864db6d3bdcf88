#include <doctest.h>

#include "gdoc/error.hpp"
#include "gdoc/gibbs.hpp"
#include "oracles.hpp"

using namespace gdoc;

TEST_SUITE("gibbs") {

TEST_CASE("free partition function is a product of two-level sums") {
  const auto spec = oracle::xxz_chain(5, 0.0, 0.3, 3);
  const double beta = 1.7;
  double expect = 1.0;
  for (const auto& [x, h] : spec.onsite) expect *= 1.0 + std::exp(-beta * h.matrix(1, 1).real());
  const auto Z = partition_function(build_restricted(spec, spec.geometry.lambda).H, beta);
  CHECK(Z.Z == doctest::Approx(expect).epsilon(1e-13));
  CHECK(Z.logZ == doctest::Approx(std::log(expect)).epsilon(1e-13));
}

TEST_CASE("log partition function survives large beta") {
  RealVector E(3);
  E << 500.0, 501.0, 503.0;
  const auto Z = partition_from_spectrum(E, 10.0);
  CHECK(Z.logZ == doctest::Approx(-5000.0 + std::log(1.0 + std::exp(-10.0) + std::exp(-30.0))));
  CHECK_THROWS_AS(partition_from_spectrum(E, 0.0), Error);
}

TEST_CASE("Ising covariances equal the closed form") {
  for (double beta : {0.1, 0.5, 1.3}) {
    for (int i = 0; i < 6; ++i) {
      for (int j = i + 1; j < 6; ++j) {
        CHECK(std::abs(ising_oracle(6, 1.0, beta, i, j) - ising_closed_form(1.0, beta, i, j)) <= 1e-10);
      }
    }
  }
  CHECK(std::abs(ising_oracle(8, 1.0, 1e-8, 0, 1)) <= 1e-6);
  CHECK_THROWS_AS(ising_oracle(6, 1.0, 0.5, 3, 3), Error);
}

TEST_CASE("expectation and covariance of a product state vanish") {
  const auto spec = oracle::xxz_chain(4, 0.0, 0.3, 3);
  const auto& L = spec.geometry.lambda;
  const ThermalState st = gibbs_state(build_restricted(spec, L).H, 2.0);
  CHECK(std::abs(st.rho.matrix.trace() - 1.0) < 1e-14);
  const auto Z0 = embed(pauli::sigma3(), Region{Site{0}}, L, 2);
  const auto Z3 = embed(pauli::sigma3(), Region{Site{3}}, L, 2);
  const double e0 = spec.onsite.at(Site{0}).matrix(1, 1).real();
  CHECK(expectation(st, Z0).real() == doctest::Approx(std::tanh(e0)).epsilon(1e-13));
  CHECK(std::abs(covariance(st, Z0, Z3)) < 1e-15);
}

TEST_CASE("many-body density of states of the free chain is binomial") {
  const auto spec = oracle::xxz_chain(6, 0.0, 0.0, 0);
  const auto bins = mbdos_histogram(build_restricted(spec, spec.geometry.lambda).H, 1.0);
  REQUIRE(bins.size() == 7);
  for (int k = 0; k <= 6; ++k) {
    CHECK(bins[k].center == doctest::Approx(k));
    CHECK(bins[k].count == static_cast<long>(oracle::binomial(6, k)));
  }
}

TEST_CASE("decay fit recovers a synthetic exponential") {
  std::vector<DecayPoint> pts;
  for (int d = 1; d <= 6; ++d) pts.push_back({d, 3.0 * std::exp(-d / 1.7)});
  pts.push_back({7, 1e-20});
  const DecayFit f = fit_decay(pts);
  CHECK(f.points_used == 6);
  CHECK(f.xi == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(fit_decay({{1, 1e-3}, {2, 1e-20}}), Error);
}

TEST_CASE("decay sweep of the free model is degenerate") {
  const auto spec = oracle::xxz_chain(6, 0.0, 0.3, 3);
  const PauliTemplate z = {{{0}, 3}};
  const auto fits = decay_sweep(spec, {1.0}, z, z, Site{0}, {2, 3, 4});
  REQUIRE(fits.size() == 1);
  CHECK(fits[0].degenerate);
  CHECK_FALSE(fits[0].finite());
  CHECK(fits[0].points.size() == 3);
  CHECK_THROWS_AS(decay_sweep(spec, {1.0}, z, z, Site{0}, {9}), ConfigError);
}

TEST_CASE("Pauli templates") {
  const PauliTemplate t = {{{0}, 1}, {{2}, 3}};
  CHECK(template_support(t, Site{4}) == Region{Site{4}, Site{6}});
  const auto op = place_template(t, Site{4});
  CHECK(relative_residual(op.matrix, oracle::kron(pauli::sigma1(), pauli::sigma3())) < 1e-15);
  CHECK_THROWS_AS(template_support({{{0}, 1}, {{0}, 3}}, Site{0}), ConfigError);
}

TEST_CASE("bound certificate") {
  const auto free = oracle::xxz_chain(5, 0.0, 0.3, 3);
  const auto c0 = bound_certificate(free);
  CHECK(c0.p == 0.0);
  CHECK(c0.decay_base == 0.0);
  CHECK(c0.active);
  CHECK(theorem_bound(c0, 1, 1.0, 1.0, 1, 1, 4) == 0.0);

  const auto spec = oracle::xxz_chain(5, 0.02, 0.3, 7);
  const auto c = bound_certificate(spec);
  CHECK(c.p == doctest::Approx(2.0 * spec.a * 8.0));
  CHECK(c.counting_constant == doctest::Approx(2.0 * std::exp(1.0) * 3.0));
  CHECK(c.ratio_constant == doctest::Approx(8.0));
  CHECK(c.decay_base == doctest::Approx(2.0 * c.p * (1.0 + c.p) * c.counting_constant * 64.0));
  CHECK_FALSE(c.active);
  CHECK(std::isinf(theorem_bound(c, 1, 1.0, 1.0, 1, 1, 4)));
}

}  // TEST_SUITE
