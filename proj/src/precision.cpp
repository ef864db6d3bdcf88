#include "gdoc/precision.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <Eigen/Eigenvalues>

#include "gdoc/error.hpp"
#include "gdoc/parallel.hpp"

namespace gdoc {
template <unsigned B>
using BinFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<B, boost::multiprecision::digit_base_2>, boost::multiprecision::et_off>;
}  // namespace gdoc

namespace Eigen {
template <unsigned B>
struct NumTraits<gdoc::BinFloat<B>> : GenericNumTraits<gdoc::BinFloat<B>> {
  using T = gdoc::BinFloat<B>;
  using Real = T;
  using NonInteger = T;
  using Literal = T;
  using Nested = T;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  static T epsilon() { return std::numeric_limits<T>::epsilon(); }
  static T dummy_precision() { return epsilon() * 1024; }
  static T highest() { return (std::numeric_limits<T>::max)(); }
  static T lowest() { return -highest(); }
  static T infinity() { return std::numeric_limits<T>::infinity(); }
  static T quiet_NaN() { return std::numeric_limits<T>::quiet_NaN(); }
  static int digits10() { return std::numeric_limits<T>::digits10; }
};
}  // namespace Eigen

namespace gdoc {

namespace {

std::atomic<unsigned> g_bits{0};

bool has_imaginary(const ComplexMatrix& M) { return (M.imag().array() != 0.0).any(); }

}  // namespace

void set_precision_bits(unsigned bits) {
  if (bits != 0 && bits != 53 && bits != 128 && bits != 256 && bits != 512) {
    throw Error("precision must be 0 (automatic), 53, 128, 256 or 512 bits");
  }
  g_bits = bits;
}

unsigned precision_override() { return g_bits.load(); }

unsigned required_bits(double beta, std::size_t order, double h_sup, double a) {
  if (const unsigned forced = g_bits.load(); forced != 0) return forced;
  const double need = 60.0 + beta * static_cast<double>(order) * h_sup * (1.0 + a) / std::log(2.0);
  if (need <= 53.0) return 53;
  for (unsigned b : {128u, 256u, 512u}) {
    if (need <= b) return b;
  }
  throw SizeCapError("alternating sum needs about " + std::to_string(static_cast<long>(std::ceil(need))) +
                     " bits of precision, above the supported " + std::to_string(kMaxPrecisionBits));
}

struct AlternatingExponentials::Impl {
  virtual ~Impl() = default;
  virtual unsigned bits() const = 0;
  virtual std::size_t terms() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual ComplexMatrix matrix(std::uint64_t mask) const = 0;
  virtual cplx trace_product(const ComplexMatrix* O, std::uint64_t mask) const = 0;
};

namespace {

// Complex Hermitian input is carried as the real symmetric [[Re, -Im], [Im, Re]].
template <class Real>
class ExpSums final : public AlternatingExponentials::Impl {
 public:
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  ExpSums(const ComplexMatrix& H0, const std::vector<ComplexMatrix>& v, double beta, unsigned bits, bool all)
      : bits_(bits), n_(H0.rows()), all_(all), full_((std::uint64_t{1} << v.size()) - 1) {
    complex_ = has_imaginary(H0);
    for (const auto& m : v) complex_ = complex_ || has_imaginary(m);
    const Matrix K0 = lift(H0);
    std::vector<Matrix> V;
    for (const auto& m : v) V.push_back(lift(m));

    const std::uint64_t count = std::uint64_t{1} << v.size();
    std::vector<Matrix> E(count);
    const Real b(beta);
    parallel_for(count, [&](std::size_t m) {
      Matrix K = K0;
      for (std::size_t k = 0; k < V.size(); ++k) {
        if (m >> k & 1U) K += V[k];
      }
      E[m] = exp_neg(K, b);
    });

    if (all_) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        const std::uint64_t bit = std::uint64_t{1} << k;
        for (std::uint64_t m = 0; m < count; ++m) {
          if (m & bit) E[m] -= E[m ^ bit];
        }
      }
      T_ = std::move(E);
    } else {
      Matrix T = Matrix::Zero(K0.rows(), K0.cols());
      for (std::uint64_t m = 0; m < count; ++m) {
        if ((v.size() - static_cast<std::size_t>(std::popcount(m))) % 2 == 1) T -= E[m];
        else T += E[m];
      }
      T_.push_back(std::move(T));
    }
  }

  unsigned bits() const override { return bits_; }
  std::size_t terms() const override { return all_ ? T_.size() : 1; }
  Eigen::Index dim() const override { return n_; }

  ComplexMatrix matrix(std::uint64_t mask) const override {
    const Matrix& T = pick(mask);
    ComplexMatrix out(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        const double re = static_cast<double>(T(i, j));
        const double im = complex_ ? static_cast<double>(T(i + n_, j)) : 0.0;
        out(i, j) = cplx(re, im);
      }
    }
    return out;
  }

  cplx trace_product(const ComplexMatrix* O, std::uint64_t mask) const override {
    const Matrix& T = pick(mask);
    Real re(0), im(0);
    for (Eigen::Index i = 0; i < n_; ++i) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        const cplx o = O ? (*O)(i, j) : (i == j ? cplx(1.0) : cplx(0.0));
        if (o == 0.0) continue;
        const Real tre = T(j, i);
        const Real tim = complex_ ? T(j + n_, i) : Real(0);
        const Real ore(o.real()), oim(o.imag());
        re += ore * tre - oim * tim;
        im += ore * tim + oim * tre;
      }
    }
    return {static_cast<double>(re), static_cast<double>(im)};
  }

 private:
  Matrix lift(const ComplexMatrix& M) const {
    const Eigen::Index n = M.rows();
    Matrix out(complex_ ? 2 * n : n, complex_ ? 2 * n : n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const Real re(M(i, j).real());
        out(i, j) = re;
        if (complex_) {
          const Real im(M(i, j).imag());
          out(i + n, j + n) = re;
          out(i + n, j) = im;
          out(i, j + n) = -im;
        }
      }
    }
    return out;
  }

  static Matrix exp_neg(Matrix K, const Real& beta) {
    using std::exp;
    K = (K + K.transpose()) / Real(2);
    const bool diagonal = (K.array() != Real(0)).count() == (K.diagonal().array() != Real(0)).count();
    if (diagonal) {
      Matrix out = Matrix::Zero(K.rows(), K.cols());
      for (Eigen::Index i = 0; i < K.rows(); ++i) out(i, i) = exp(-beta * K(i, i));
      return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    if (es.info() != Eigen::Success) throw Error("extended-precision eigensolver did not converge");
    Vector w = es.eigenvalues();
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = exp(-beta * w(i));
    const Matrix& U = es.eigenvectors();
    return (U * w.asDiagonal()) * U.transpose();
  }

  const Matrix& pick(std::uint64_t mask) const {
    if (all_) {
      if (mask >= T_.size()) throw Error("alternating sum mask out of range");
      return T_[mask];
    }
    if (mask != full_) throw Error("only the full mask was kept");
    return T_.front();
  }

  unsigned bits_;
  Eigen::Index n_;
  bool all_;
  std::uint64_t full_;
  bool complex_ = false;
  std::vector<Matrix> T_;
};

}  // namespace

AlternatingExponentials::AlternatingExponentials(const ComplexMatrix& H0, const std::vector<ComplexMatrix>& v,
                                                 double beta, unsigned bits, bool all_masks) {
  if (H0.rows() != H0.cols()) throw Error("H0 must be square");
  for (const auto& m : v) {
    if (m.rows() != H0.rows() || m.cols() != H0.cols()) throw Error("interaction has the wrong dimension");
  }
  if (v.size() > 30) throw SizeCapError("alternating sum over more than 30 interactions");
  switch (bits) {
    case 53: impl_ = std::make_shared<ExpSums<double>>(H0, v, beta, bits, all_masks); break;
    case 128: impl_ = std::make_shared<ExpSums<BinFloat<128>>>(H0, v, beta, bits, all_masks); break;
    case 256: impl_ = std::make_shared<ExpSums<BinFloat<256>>>(H0, v, beta, bits, all_masks); break;
    case 512: impl_ = std::make_shared<ExpSums<BinFloat<512>>>(H0, v, beta, bits, all_masks); break;
    default: throw Error("unsupported precision: " + std::to_string(bits) + " bits");
  }
}

unsigned AlternatingExponentials::bits() const { return impl_->bits(); }
std::size_t AlternatingExponentials::terms() const { return impl_->terms(); }
ComplexMatrix AlternatingExponentials::matrix(std::uint64_t mask) const { return impl_->matrix(mask); }
cplx AlternatingExponentials::trace(std::uint64_t mask) const { return impl_->trace_product(nullptr, mask); }
cplx AlternatingExponentials::trace_product(const ComplexMatrix& O, std::uint64_t mask) const {
  if (O.rows() != impl_->dim() || O.cols() != impl_->dim()) throw Error("observable has the wrong dimension");
  return impl_->trace_product(&O, mask);
}

}  // namespace gdoc
