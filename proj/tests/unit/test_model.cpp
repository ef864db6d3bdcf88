#include <doctest.h>

#include <random>

#include "gdoc/error.hpp"
#include "gdoc/model.hpp"
#include "oracles.hpp"

using namespace gdoc;

namespace {

// max over random ψ of |<ψ,vψ>| / <ψ,Kψ>: a lower bound for the certified constant.
double sampled_ratio(const ComplexMatrix& v, const ComplexMatrix& K, int samples, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    ComplexVector psi(v.rows());
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cplx(g(rng), g(rng));
    const double num = std::abs(psi.dot(v * psi));
    const double den = psi.dot(K * psi).real();
    if (den > 1e-12) best = std::max(best, num / den);
  }
  return best;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("gap check") {
  CHECK(gap_check({Site{0}, pauli::number()}));
  CHECK(gap_check({Site{0}, 1.5 * pauli::number()}));
  CHECK_FALSE(gap_check({Site{0}, 0.5 * pauli::number()}));
  CHECK_FALSE(gap_check({Site{0}, pauli::sigma3()}));
  CHECK_FALSE(gap_check({Site{0}, ComplexMatrix::Zero(2, 2)}));
}

TEST_CASE("three-site hopping chain has the closed-form constant") {
  // v = 2J(hop01 + hop12), K = (N0+N1+N2)/3; one-particle sector: tight-binding ±2√2 J against 1/3.
  const double J = 0.01;
  const auto spec = oracle::xxz_chain(3, J, 0.0, 0);
  XxzParams p;
  p.J12 = nearest_neighbour_couplings(chain_geometry(3, 1).lambda, J);
  const auto hop_only = xxz_spec(chain_geometry(3, 1).lambda, p);
  CHECK(hop_only.a == doctest::Approx(6.0 * std::sqrt(2.0) * J).epsilon(1e-10));
  CHECK(spec.a >= hop_only.a - 1e-12);
}

TEST_CASE("certified constant is tight against random states") {
  std::mt19937_64 rng(11);
  const auto spec = oracle::xxz_chain(4, 0.01, 0.3, 5);
  for (const auto& [x, v] : spec.interactions) {
    const Region& B = v.support;
    const ComplexMatrix K = onsite_sum(spec, B, B) / static_cast<double>(spec.ball_size());
    const double a = spec.local_a.at(x);
    const double sampled = sampled_ratio(v.matrix, K, 4000, rng);
    CHECK(sampled <= a + 1e-12);
    // Generalized eigenvector of the pencil attains the constant.
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> ek(K);
    std::vector<Eigen::Index> range;
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
      if (ek.eigenvalues()(i) > 1e-10) range.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(range.size());
    ComplexMatrix U(K.rows(), m);
    RealVector sq(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      U.col(k) = ek.eigenvectors().col(range[k]);
      sq(k) = 1.0 / std::sqrt(ek.eigenvalues()(range[k]));
    }
    const ComplexMatrix P = sq.asDiagonal() * (U.adjoint() * v.matrix * U) * sq.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> ep(P);
    const double pencil = std::max(std::abs(ep.eigenvalues()(0)), std::abs(ep.eigenvalues()(m - 1)));
    CHECK(a == doctest::Approx(pencil).epsilon(1e-10));
  }
}

TEST_CASE("form bound with support on the kernel of K is infinite") {
  const auto geo = chain_geometry(3, 1);
  std::vector<OnSiteTerm> onsite;
  for (const auto& x : geo.lambda) onsite.push_back({x, pauli::number()});
  // σ¹ on the middle site couples the ground state to an excitation.
  const ComplexMatrix v = 0.01 * embed(pauli::sigma1(), Region{Site{1}}, geo.lambda, 2).matrix;
  HamiltonianSpec spec = make_spec(geo, 2, onsite, {});
  const FormBound fb = certify_form_bound({Site{1}, geo.lambda, v}, spec);
  CHECK_FALSE(fb.finite);
  CHECK(fb.kernel_coupling == doctest::Approx(0.01));
  try {
    make_spec(geo, 2, onsite, {{Site{1}, geo.lambda, v}});
    FAIL("expected a certification failure");
  } catch (const CertificationError& e) {
    CHECK(e.center() == Site{1});
  }
}

TEST_CASE("claimed constant is enforced") {
  const Region chain = chain_geometry(4, 1).lambda;
  XxzParams p;
  p.J12 = nearest_neighbour_couplings(chain, 0.01);
  const auto spec = xxz_spec(chain, p);
  p.claimed_a = spec.a;
  CHECK_NOTHROW(xxz_spec(chain, p));
  p.claimed_a = spec.a * 0.5;
  CHECK_THROWS_AS(xxz_spec(chain, p), CertificationError);
  p.claimed_a.reset();
  p.J12 = nearest_neighbour_couplings(chain, 0.45);
  CHECK_THROWS_AS(xxz_spec(chain, p), CertificationError);
}

TEST_CASE("xxz configuration errors") {
  const Region chain = chain_geometry(4, 1).lambda;
  XxzParams p;
  p.J12 = {{Site{0}, Site{2}, 0.01}};
  CHECK_THROWS_AS(xxz_spec(chain, p), ConfigError);
  p.J12 = {{Site{0}, Site{9}, 0.01}};
  CHECK_THROWS_AS(xxz_spec(chain, p), ConfigError);
  p.J12 = {{Site{0}, Site{1}, 0.01}, {Site{1}, Site{0}, 0.02}};
  CHECK_THROWS_AS(xxz_spec(chain, p), ConfigError);
  p.J12 = {{Site{0}, Site{1}, 0.01}, {Site{1}, Site{0}, 0.01}};
  CHECK_NOTHROW(xxz_spec(chain, p));
}

TEST_CASE("restricted Hamiltonian and disorder") {
  const auto spec = oracle::xxz_chain(4, 0.02, 0.3, 7);
  const auto rh = build_restricted(spec, spec.geometry.lambda);
  CHECK(relative_residual(rh.H.matrix, rh.H0.matrix + rh.V.matrix) == 0.0);
  CHECK(is_hermitian(rh.H.matrix));
  // Ground state of H0 is the all-zero basis state with energy 0 and V annihilates it.
  CHECK(std::abs(rh.H0.matrix(0, 0)) == 0.0);
  CHECK(rh.V.matrix.col(0).norm() == 0.0);
  const auto d1 = disorder_draws(7, 4), d2 = disorder_draws(7, 4), d3 = disorder_draws(8, 4);
  CHECK(d1 == d2);
  CHECK(d1 != d3);
  for (double w : d1) CHECK((w >= 0.0 && w < 1.0));
  const auto& h0 = spec.onsite.at(Site{0}).matrix;
  CHECK(h0(1, 1).real() == doctest::Approx(1.0 + 0.3 * d1[0]));
  CHECK(centers_within(spec, Region{Site{0}, Site{1}}).empty());
  CHECK(centers_within(spec, spec.geometry.lambda) == Region{Site{1}, Site{2}});
}

TEST_CASE("normalization keeps H and makes every v nonpositive") {
  const auto spec = oracle::xxz_chain(6, 0.02, 0.3, 7);
  const auto n = normalize_nonpositive(spec);
  CHECK(n.nonpositive);
  const auto& L = spec.geometry.lambda;
  CHECK(relative_residual(build_restricted(n, L).H.matrix, build_restricted(spec, L).H.matrix) < 1e-14);
  for (const auto& [x, v] : n.interactions) CHECK(herm_eig(v.matrix).eigenvalues.maxCoeff() <= 1e-12);
}

TEST_CASE("spectrum bracket holds for a certified instance") {
  const auto spec = oracle::xxz_chain(6, 0.02, 0.3, 7);
  CHECK(bracket_violation(spec, spec.geometry.lambda) <= 1e-9);
}

}  // TEST_SUITE
