#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "gdoc/algebra.hpp"
#include "gdoc/model.hpp"

namespace gdoc {

struct PartitionValue {
  double Z = 0.0;
  double logZ = 0.0;
};

/// Σ_j exp(-β E_j) with max-shifted log.
PartitionValue partition_from_spectrum(const RealVector& E, double beta);
PartitionValue partition_function(const GlobalOperator& H, double beta);

struct ThermalState {
  Region region;
  double beta = 0.0;
  GlobalOperator rho;
  double logZ = 0.0;
};

ThermalState gibbs_state(const GlobalOperator& H, double beta);
ThermalState gibbs_state(const Eigensystem& es, const Region& region, int q, double beta);

cplx expectation(const ThermalState& state, const GlobalOperator& A);
/// tr(AB ρ) - tr(A ρ) tr(B ρ)
cplx covariance(const ThermalState& state, const GlobalOperator& A, const GlobalOperator& B);

/// One factor of a Pauli string: Pauli index 0..3 at anchor + offset.
struct PauliFactor {
  std::vector<int> offset;
  int pauli = 3;
};
using PauliTemplate = std::vector<PauliFactor>;

/// Support of the template placed at `anchor`.
Region template_support(const PauliTemplate& t, const Site& anchor);
/// Product of the template's factors on their support (q = 2).
GlobalOperator place_template(const PauliTemplate& t, const Site& anchor);

constexpr double kNumericalFloor = 1e-13;

struct DecayPoint {
  int distance = 0;
  double abs_cov = 0.0;
};

struct DecayFit {
  double beta = 0.0;
  std::vector<DecayPoint> points;  // every distance in the sweep
  std::size_t points_used = 0;     // points above the floor
  double slope = 0.0;
  double intercept = 0.0;
  double xi = 0.0;                 // -1/slope; +inf when slope >= 0
  bool degenerate = false;         // fewer than two points above the floor
  bool finite() const { return !degenerate && std::isfinite(xi) && xi > 0.0; }
};

/// Least squares of ln|cov| against distance over the points above the floor. Throws with fewer
/// than two such points.
DecayFit fit_decay(std::vector<DecayPoint> points, double floor = kNumericalFloor);

/// For each β: A at `anchor`, B at anchor + d e_1 for every d; one eigendecomposition shared by
/// all β. Fits that lack two usable points come back marked degenerate.
std::vector<DecayFit> decay_sweep(const HamiltonianSpec& spec, const std::vector<double>& betas,
                                  const PauliTemplate& A, const PauliTemplate& B, const Site& anchor,
                                  const std::vector<int>& distances, double floor = kNumericalFloor);

/// H = -J Σ σ³_k σ³_{k+1} on sites 0..n-1, free boundaries.
GlobalOperator ising_chain_hamiltonian(int n, double J);
/// Cov(σ³_i, σ³_j) in the Gibbs state of the chain above.
double ising_oracle(int n, double J, double beta, int i, int j);
/// tanh(βJ)^{j-i}
double ising_closed_form(double J, double beta, int i, int j);

struct HistogramBin {
  double center = 0.0;
  long count = 0;
};
/// Bins of width w centred on multiples of w, contiguous from the lowest to the highest occupied bin.
std::vector<HistogramBin> mbdos_histogram(const RealVector& eigenvalues, double bin_width);
std::vector<HistogramBin> mbdos_histogram(const GlobalOperator& H, double bin_width);

struct BoundCertificate {
  double p = 0.0;                   // 2 a q^{(2R+1)^D}
  double counting_constant = 0.0;   // 2e(2R+1)^D
  double ratio_constant = 0.0;      // partition-ratio constant per site
  double decay_base = 0.0;          // 2p(1+p) C_count C_ratio^2
  double prefactor_exponent = 0.0;  // ln(1/2 + 1/(2p))
  bool active = false;              // decay_base < 1
};

/// `ratio_constant` defaults to q^{(2R+1)^D}.
BoundCertificate bound_certificate(const HamiltonianSpec& spec,
                                   std::optional<double> ratio_constant = std::nullopt);

/// 2‖A‖‖B‖ (1/2 + 1/(2p))^{|X|+|Y|} base^{d/(2R)} / (1 - base); +inf if the certificate is inactive.
double theorem_bound(const BoundCertificate& cert, int R, double normA, double normB,
                     std::size_t sizeX, std::size_t sizeY, int distance);

}  // namespace gdoc
