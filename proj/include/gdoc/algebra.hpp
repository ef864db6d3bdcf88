#pragma once

#include <complex>
#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "gdoc/lattice.hpp"

namespace gdoc {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// q^m with overflow and size checks; throws SizeCapError above `cap`.
std::size_t hilbert_dim(int q, std::size_t m, std::size_t cap = std::size_t{1} << 14);

/// Dense operator on the tensor product space of `region` with local dimension q.
/// Basis index = Σ_k d_k q^{m-1-k}, sites in Region order (first site most significant).
struct GlobalOperator {
  Region region;
  int q = 2;
  ComplexMatrix matrix;

  GlobalOperator() = default;
  GlobalOperator(Region region, int q, ComplexMatrix matrix);

  static GlobalOperator identity(const Region& region, int q);
  static GlobalOperator zero(const Region& region, int q);

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// A ⊗ 1 on `target`, placing the local factors according to target's site order.
GlobalOperator embed(const ComplexMatrix& local, const Region& support, const Region& target, int q);
GlobalOperator embed(const GlobalOperator& op, const Region& target);
/// A ⊗ B on A.region ∪ B.region; the regions must be disjoint.
GlobalOperator tensor(const GlobalOperator& A, const GlobalOperator& B);
/// A·B on A.region ∪ B.region (supports may overlap).
GlobalOperator product(const GlobalOperator& A, const GlobalOperator& B);

/// out += scale · (A ⊗ 1), with out already of dimension q^|target|.
void embed_accumulate(ComplexMatrix& out, const ComplexMatrix& local, const Region& support,
                      const Region& target, int q, cplx scale = 1.0);

struct Eigensystem {
  RealVector eigenvalues;  // ascending
  ComplexMatrix vectors;   // columns
  std::optional<Eigen::MatrixXd> real_vectors;  // set when the input was real symmetric
};

constexpr double kHermitianTolerance = 1e-10;

bool is_hermitian(const ComplexMatrix& M, double tol = kHermitianTolerance);
Eigensystem herm_eig(const ComplexMatrix& M);
RealVector herm_eigenvalues(const ComplexMatrix& M);
/// exp(s M) for Hermitian M.
ComplexMatrix herm_exp(const ComplexMatrix& M, double s);
/// U f(Λ) U* for a precomputed eigensystem.
ComplexMatrix apply_spectral(const Eigensystem& es, const RealVector& f);

double op_norm(const ComplexMatrix& M);
double frobenius_norm(const ComplexMatrix& M);
cplx trace(const ComplexMatrix& M);
/// tr(A B) without forming the product.
cplx trace_product(const ComplexMatrix& A, const ComplexMatrix& B);

/// ‖A − B‖_F / max(‖B‖_F, floor)
double relative_residual(const ComplexMatrix& A, const ComplexMatrix& B, double floor = 1e-300);
double relative_residual(cplx a, cplx b, double floor = 1e-300);

// Local operators for q = 2. State 0 is the local ground state.
namespace pauli {
ComplexMatrix identity();
ComplexMatrix sigma1();
ComplexMatrix sigma2();
ComplexMatrix sigma3();
ComplexMatrix sigma_plus();   // |0><1|
ComplexMatrix sigma_minus();  // |1><0|
ComplexMatrix number();       // diag(0, 1)
/// 0 → 1, 1..3 → σ¹..σ³
ComplexMatrix by_index(int k);
}  // namespace pauli

/// Tensor product of the given local matrices (first factor most significant).
ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B);

}  // namespace gdoc
