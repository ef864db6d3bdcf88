#include "gdoc/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gdoc/error.hpp"

namespace gdoc {

namespace {

double max_abs(const ComplexMatrix& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& M, const char* what) {
  if (M.rows() != M.cols() || M.rows() < 1) {
    throw Error(std::string(what) + ": matrix must be square and nonempty");
  }
}

bool is_diagonal(const ComplexMatrix& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (i != j && M(i, j) != cplx(0.0, 0.0)) return false;
    }
  }
  return true;
}

ComplexMatrix symmetrized(const ComplexMatrix& M) {
  require_square(M, "herm_eig");
  if (!is_hermitian(M)) throw Error("matrix is not Hermitian within tolerance");
  return (M + M.adjoint()) * 0.5;
}

}  // namespace

std::size_t hilbert_dim(int q, std::size_t m, std::size_t cap) {
  if (q < 2) throw Error("local dimension q must be at least 2");
  std::size_t d = 1;
  for (std::size_t k = 0; k < m; ++k) {
    if (d > cap / static_cast<std::size_t>(q)) {
      throw SizeCapError("Hilbert space dimension " + std::to_string(q) + "^" + std::to_string(m) +
                         " exceeds the cap of " + std::to_string(cap));
    }
    d *= static_cast<std::size_t>(q);
  }
  return d;
}

GlobalOperator::GlobalOperator(Region region_, int q_, ComplexMatrix matrix_)
    : region(std::move(region_)), q(q_), matrix(std::move(matrix_)) {
  const auto d = static_cast<Eigen::Index>(hilbert_dim(q, region.size()));
  if (matrix.rows() != d || matrix.cols() != d) {
    throw Error("operator dimension " + std::to_string(matrix.rows()) + "x" +
                std::to_string(matrix.cols()) + " does not match q^|region| = " + std::to_string(d));
  }
}

GlobalOperator GlobalOperator::identity(const Region& region, int q) {
  const auto d = static_cast<Eigen::Index>(hilbert_dim(q, region.size()));
  return GlobalOperator(region, q, ComplexMatrix::Identity(d, d));
}

GlobalOperator GlobalOperator::zero(const Region& region, int q) {
  const auto d = static_cast<Eigen::Index>(hilbert_dim(q, region.size()));
  return GlobalOperator(region, q, ComplexMatrix::Zero(d, d));
}

void embed_accumulate(ComplexMatrix& out, const ComplexMatrix& local, const Region& support,
                      const Region& target, int q, cplx scale) {
  if (!target.includes(support)) throw Error("embed: support is not contained in the target region");
  const std::size_t m = target.size();
  const std::size_t s = support.size();
  const auto ds = static_cast<Eigen::Index>(hilbert_dim(q, s));
  if (local.rows() != ds || local.cols() != ds) {
    throw Error("embed: local operator has dimension " + std::to_string(local.rows()) +
                ", expected " + std::to_string(ds));
  }
  const auto N = static_cast<Eigen::Index>(hilbert_dim(q, m));
  if (out.rows() != N || out.cols() != N) throw Error("embed: output has the wrong dimension");

  // Stride of every target position; support positions are kept in support order.
  std::vector<std::size_t> stride(m);
  for (std::size_t k = 0; k < m; ++k) stride[k] = hilbert_dim(q, m - 1 - k);
  std::vector<bool> in_support(m, false);
  std::vector<std::size_t> sup_stride;
  for (const auto& x : support) {
    const std::size_t k = *target.position(x);
    in_support[k] = true;
    sup_stride.push_back(stride[k]);
  }
  std::vector<std::size_t> rest_stride;
  for (std::size_t k = 0; k < m; ++k) {
    if (!in_support[k]) rest_stride.push_back(stride[k]);
  }

  auto offsets = [q](const std::vector<std::size_t>& strides) {
    std::vector<Eigen::Index> out{0};
    for (std::size_t st : strides) {
      std::vector<Eigen::Index> next;
      next.reserve(out.size() * static_cast<std::size_t>(q));
      for (Eigen::Index o : out) {
        for (int d = 0; d < q; ++d) next.push_back(o + static_cast<Eigen::Index>(static_cast<std::size_t>(d) * st));
      }
      out = std::move(next);
    }
    return out;
  };
  const auto off_sup = offsets(sup_stride);
  const auto off_rest = offsets(rest_stride);

  for (Eigen::Index b = 0; b < ds; ++b) {
    for (Eigen::Index a = 0; a < ds; ++a) {
      const cplx v = scale * local(a, b);
      if (v == cplx(0.0, 0.0)) continue;
      const Eigen::Index ra = off_sup[static_cast<std::size_t>(a)];
      const Eigen::Index cb = off_sup[static_cast<std::size_t>(b)];
      for (Eigen::Index r : off_rest) out(r + ra, r + cb) += v;
    }
  }
}

GlobalOperator embed(const ComplexMatrix& local, const Region& support, const Region& target, int q) {
  const auto N = static_cast<Eigen::Index>(hilbert_dim(q, target.size()));
  ComplexMatrix out = ComplexMatrix::Zero(N, N);
  embed_accumulate(out, local, support, target, q);
  return GlobalOperator(target, q, std::move(out));
}

GlobalOperator embed(const GlobalOperator& op, const Region& target) {
  return embed(op.matrix, op.region, target, op.q);
}

GlobalOperator tensor(const GlobalOperator& A, const GlobalOperator& B) {
  if (A.q != B.q) throw Error("tensor: local dimensions differ");
  if (!(A.region & B.region).empty()) throw Error("tensor: regions overlap");
  const Region target = A.region | B.region;
  const int q = A.q;
  const std::size_t m = target.size();
  const auto N = static_cast<Eigen::Index>(hilbert_dim(q, m));
  // Split every target index into its A-part and B-part.
  std::vector<Eigen::Index> ia(static_cast<std::size_t>(N)), ib(static_cast<std::size_t>(N));
  for (Eigen::Index t = 0; t < N; ++t) {
    Eigen::Index rest = t, a = 0, b = 0, sa = 1, sb = 1;
    for (std::size_t k = m; k-- > 0;) {
      const Eigen::Index d = rest % q;
      rest /= q;
      if (A.region.contains(target[k])) {
        a += d * sa;
        sa *= q;
      } else {
        b += d * sb;
        sb *= q;
      }
    }
    ia[static_cast<std::size_t>(t)] = a;
    ib[static_cast<std::size_t>(t)] = b;
  }
  ComplexMatrix out(N, N);
  for (Eigen::Index u = 0; u < N; ++u) {
    const Eigen::Index au = ia[static_cast<std::size_t>(u)], bu = ib[static_cast<std::size_t>(u)];
    for (Eigen::Index t = 0; t < N; ++t) {
      out(t, u) = A.matrix(ia[static_cast<std::size_t>(t)], au) * B.matrix(ib[static_cast<std::size_t>(t)], bu);
    }
  }
  return GlobalOperator(target, q, std::move(out));
}

GlobalOperator product(const GlobalOperator& A, const GlobalOperator& B) {
  if (A.q != B.q) throw Error("product: local dimensions differ");
  const Region target = A.region | B.region;
  return GlobalOperator(target, A.q, embed(A, target).matrix * embed(B, target).matrix);
}

bool is_hermitian(const ComplexMatrix& M, double tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(1.0, max_abs(M));
  return max_abs(M - M.adjoint()) <= tol * scale;
}

Eigensystem herm_eig(const ComplexMatrix& M) {
  const ComplexMatrix H = symmetrized(M);
  const Eigen::Index n = H.rows();
  Eigensystem es;
  if (is_diagonal(H)) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return H(a, a).real() < H(b, b).real(); });
    es.eigenvalues.resize(n);
    es.vectors = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      es.eigenvalues(k) = H(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(k)]).real();
      es.vectors(idx[static_cast<std::size_t>(k)], k) = 1.0;
    }
    return es;
  }
  if (H.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H.real());
    if (solver.info() != Eigen::Success) throw Error("herm_eig: eigensolver did not converge");
    es.eigenvalues = solver.eigenvalues();
    es.real_vectors = solver.eigenvectors();
    es.vectors = es.real_vectors->cast<cplx>();
    return es;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(H);
  if (solver.info() != Eigen::Success) throw Error("herm_eig: eigensolver did not converge");
  es.eigenvalues = solver.eigenvalues();
  es.vectors = solver.eigenvectors();
  return es;
}

RealVector herm_eigenvalues(const ComplexMatrix& M) {
  const ComplexMatrix H = symmetrized(M);
  if (is_diagonal(H)) {
    RealVector ev = H.diagonal().real();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev;
  }
  if (H.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H.real(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("herm_eig: eigensolver did not converge");
    return solver.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("herm_eig: eigensolver did not converge");
  return solver.eigenvalues();
}

ComplexMatrix apply_spectral(const Eigensystem& es, const RealVector& f) {
  if (f.size() != es.eigenvalues.size()) throw Error("apply_spectral: size mismatch");
  if (es.real_vectors) {
    const Eigen::MatrixXd& U = *es.real_vectors;
    return (U * f.asDiagonal() * U.transpose()).cast<cplx>();
  }
  return es.vectors * f.asDiagonal() * es.vectors.adjoint();
}

ComplexMatrix herm_exp(const ComplexMatrix& M, double s) {
  const Eigensystem es = herm_eig(M);
  const RealVector f = (s * es.eigenvalues.array()).exp().matrix();
  return apply_spectral(es, f);
}

double op_norm(const ComplexMatrix& M) {
  require_square(M, "op_norm");
  if (is_hermitian(M, 1e-14)) {
    const RealVector ev = herm_eigenvalues(M);
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  }
  const RealVector ev = herm_eigenvalues(M.adjoint() * M);
  return std::sqrt(std::max(0.0, ev(ev.size() - 1)));
}

double frobenius_norm(const ComplexMatrix& M) { return M.norm(); }

cplx trace(const ComplexMatrix& M) {
  require_square(M, "trace");
  return M.trace();
}

cplx trace_product(const ComplexMatrix& A, const ComplexMatrix& B) {
  if (A.cols() != B.rows() || A.rows() != B.cols()) throw Error("trace_product: shape mismatch");
  // tr(AB) = Σ_ij A_ij B_ji
  return (A.array() * B.transpose().array()).sum();
}

double relative_residual(const ComplexMatrix& A, const ComplexMatrix& B, double floor) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw Error("relative_residual: shape mismatch");
  return (A - B).norm() / std::max(B.norm(), floor);
}

double relative_residual(cplx a, cplx b, double floor) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

namespace pauli {

ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix sigma1() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix sigma2() {
  ComplexMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

ComplexMatrix sigma3() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix sigma_plus() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  return m;
}

ComplexMatrix sigma_minus() {
  ComplexMatrix m(2, 2);
  m << 0, 0, 1, 0;
  return m;
}

ComplexMatrix number() {
  ComplexMatrix m(2, 2);
  m << 0, 0, 0, 1;
  return m;
}

ComplexMatrix by_index(int k) {
  switch (k) {
    case 0: return identity();
    case 1: return sigma1();
    case 2: return sigma2();
    case 3: return sigma3();
    default: throw Error("Pauli index must be in 0..3, got " + std::to_string(k));
  }
}

}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return out;
}

}  // namespace gdoc
