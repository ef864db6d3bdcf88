#include <doctest.h>

#include <random>

#include "gdoc/algebra.hpp"
#include "gdoc/error.hpp"
#include "oracles.hpp"

using namespace gdoc;

namespace {

ComplexMatrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = cplx(g(rng), g(rng));
  return M;
}

ComplexMatrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  const ComplexMatrix M = random_matrix(n, rng);
  return (M + M.adjoint()) * 0.5;
}

}  // namespace

TEST_SUITE("algebra") {

TEST_CASE("hilbert_dim and its cap") {
  CHECK(hilbert_dim(2, 3) == 8);
  CHECK(hilbert_dim(3, 0) == 1);
  CHECK(hilbert_dim(2, 14) == 16384);
  CHECK_THROWS_AS(hilbert_dim(2, 15), SizeCapError);
}

TEST_CASE("embedding agrees with explicit Kronecker products") {
  std::mt19937_64 rng(1);
  const ComplexMatrix A = random_matrix(2, rng);
  const ComplexMatrix I2 = ComplexMatrix::Identity(2, 2);
  const Region target{Site{0}, Site{1}, Site{2}};
  CHECK(relative_residual(embed(A, Region{Site{0}}, target, 2).matrix, oracle::kron(oracle::kron(A, I2), I2)) < 1e-15);
  CHECK(relative_residual(embed(A, Region{Site{1}}, target, 2).matrix, oracle::kron(oracle::kron(I2, A), I2)) < 1e-15);
  CHECK(relative_residual(embed(A, Region{Site{2}}, target, 2).matrix, oracle::kron(oracle::kron(I2, I2), A)) < 1e-15);

  const ComplexMatrix B = random_matrix(4, rng);
  CHECK(relative_residual(embed(B, Region{Site{0}, Site{1}}, target, 2).matrix, oracle::kron(B, I2)) < 1e-15);

  // Non-adjacent support: conjugate the adjacent embedding with the swap of sites 1 and 2.
  ComplexMatrix swap12 = ComplexMatrix::Zero(8, 8);
  for (int s = 0; s < 8; ++s) {
    const int b0 = s >> 2 & 1, b1 = s >> 1 & 1, b2 = s & 1;
    swap12((b0 << 2) | (b2 << 1) | b1, s) = 1.0;
  }
  const ComplexMatrix expect = swap12 * oracle::kron(B, I2) * swap12;
  CHECK(relative_residual(embed(B, Region{Site{0}, Site{2}}, target, 2).matrix, expect) < 1e-15);
}

TEST_CASE("qutrit embedding") {
  std::mt19937_64 rng(2);
  const ComplexMatrix A = random_matrix(3, rng);
  const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3);
  const Region target{Site{4}, Site{7}};
  CHECK(relative_residual(embed(A, Region{Site{7}}, target, 3).matrix, oracle::kron(I3, A)) < 1e-15);
}

TEST_CASE("tensor and product") {
  std::mt19937_64 rng(3);
  const GlobalOperator A(Region{Site{0}}, 2, random_matrix(2, rng));
  const GlobalOperator B(Region{Site{2}}, 2, random_matrix(2, rng));
  const GlobalOperator AB = tensor(A, B);
  CHECK(AB.region == Region{Site{0}, Site{2}});
  CHECK(relative_residual(AB.matrix, oracle::kron(A.matrix, B.matrix)) < 1e-15);
  const GlobalOperator BA = tensor(B, A);
  CHECK(relative_residual(BA.matrix, AB.matrix) < 1e-15);
  const GlobalOperator P = product(A, B);
  CHECK(relative_residual(P.matrix, AB.matrix) < 1e-14);
  CHECK_THROWS_AS(tensor(A, A), Error);

  const GlobalOperator C(Region{Site{0}, Site{1}}, 2, random_matrix(4, rng));
  const GlobalOperator CA = product(C, A);
  CHECK(relative_residual(CA.matrix, C.matrix * oracle::kron(A.matrix, ComplexMatrix::Identity(2, 2))) < 1e-14);
}

TEST_CASE("Hermitian exponential matches a Taylor series") {
  std::mt19937_64 rng(4);
  for (Eigen::Index n : {1, 2, 5, 16}) {
    const ComplexMatrix H = random_hermitian(n, rng);
    for (double s : {-2.0, -0.3, 0.7}) {
      CHECK(relative_residual(herm_exp(H, s), oracle::expm(s * H)) < 1e-12);
    }
  }
  Eigen::MatrixXd R = Eigen::MatrixXd::Random(6, 6);
  const ComplexMatrix Hr = ((R + R.transpose()) * 0.5).cast<cplx>();
  CHECK(relative_residual(herm_exp(Hr, -1.0), oracle::expm(-Hr)) < 1e-12);
  const ComplexMatrix Hd = RealVector::LinSpaced(4, 0.0, 3.0).cast<cplx>().asDiagonal();
  CHECK(relative_residual(herm_exp(Hd, -1.0), oracle::expm(-Hd)) < 1e-14);
}

TEST_CASE("eigensystem reconstructs the matrix") {
  std::mt19937_64 rng(5);
  const ComplexMatrix H = random_hermitian(7, rng);
  const Eigensystem es = herm_eig(H);
  for (Eigen::Index k = 1; k < es.eigenvalues.size(); ++k) CHECK(es.eigenvalues(k - 1) <= es.eigenvalues(k));
  CHECK(relative_residual(apply_spectral(es, es.eigenvalues), H) < 1e-13);
  CHECK_FALSE(is_hermitian(random_matrix(3, rng)));
}

TEST_CASE("norms and traces") {
  ComplexMatrix M(2, 2);
  M << 0.0, 2.0, 0.0, 0.0;
  CHECK(op_norm(M) == doctest::Approx(2.0));
  CHECK(op_norm(pauli::sigma3()) == doctest::Approx(1.0));
  CHECK(frobenius_norm(pauli::sigma1()) == doctest::Approx(std::sqrt(2.0)));
  std::mt19937_64 rng(6);
  const ComplexMatrix A = random_matrix(5, rng), B = random_matrix(5, rng);
  CHECK(std::abs(trace_product(A, B) - (A * B).trace()) < 1e-12);
  CHECK(relative_residual(cplx(1.0), cplx(1.0)) == 0.0);
  CHECK(relative_residual(cplx(0.0), cplx(0.0)) == 0.0);
}

TEST_CASE("Pauli algebra") {
  const cplx i(0.0, 1.0);
  CHECK(relative_residual(pauli::sigma1() * pauli::sigma2(), i * pauli::sigma3()) < 1e-15);
  CHECK(relative_residual(pauli::sigma_plus() + pauli::sigma_minus(), pauli::sigma1()) < 1e-15);
  CHECK(relative_residual(pauli::sigma_minus() * pauli::sigma_plus(), pauli::number()) < 1e-15);
  CHECK(pauli::number()(0, 0) == 0.0);
  CHECK(relative_residual(pauli::by_index(0), pauli::identity()) < 1e-15);
  CHECK(relative_residual(kron(pauli::sigma1(), pauli::sigma3()), oracle::kron(pauli::sigma1(), pauli::sigma3())) < 1e-15);
}

}  // TEST_SUITE
