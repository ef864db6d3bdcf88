#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "gdoc/algebra.hpp"

namespace gdoc {

/// Working precisions for alternating exponential sums: 53 (double), 128, 256 or 512 bits.
constexpr unsigned kMaxPrecisionBits = 512;

/// Forces a working precision for every alternating sum; 0 restores the automatic choice.
void set_precision_bits(unsigned bits);
unsigned precision_override();

/// Bits needed to resolve a sum of `order` nested differences of exp(-βK) where each difference
/// removes a factor of about exp(-β h (1 + a)). Returns one of the supported precisions and throws
/// SizeCapError if more than kMaxPrecisionBits would be required.
unsigned required_bits(double beta, std::size_t order, double h_sup, double a);

/// T_m = Σ_{M⊆m} (-1)^{|m∖M|} exp(-β(H0 + Σ_{k∈M} v_k)) for every mask m over the v_k, held at the
/// chosen precision. H0 and every v_k must be Hermitian and of equal dimension.
class AlternatingExponentials {
 public:
  /// all_masks = false keeps only the full mask (2^n exponentials are still formed).
  AlternatingExponentials(const ComplexMatrix& H0, const std::vector<ComplexMatrix>& v, double beta,
                          unsigned bits, bool all_masks = true);

  unsigned bits() const;
  std::size_t terms() const;
  /// T_mask rounded to double.
  ComplexMatrix matrix(std::uint64_t mask) const;
  cplx trace(std::uint64_t mask) const;
  /// tr(O T_mask), accumulated at the working precision.
  cplx trace_product(const ComplexMatrix& O, std::uint64_t mask) const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

}  // namespace gdoc
