#include "gdoc/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Sparse>

#include "gdoc/error.hpp"

namespace gdoc {

namespace {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

// Σ_ij S_ij D_ji
cplx trace_sparse_dense(const SparseMatrix& S, const ComplexMatrix& D) {
  cplx acc = 0.0;
  for (Eigen::Index k = 0; k < S.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(S, k); it; ++it) acc += it.value() * D(it.col(), it.row());
  }
  return acc;
}

SparseMatrix sparse_of(const ComplexMatrix& M) { return M.sparseView(); }

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error("beta must be a positive finite number");
}

}  // namespace

PartitionValue partition_from_spectrum(const RealVector& E, double beta) {
  require_beta(beta);
  const double e0 = E.minCoeff();
  const double s = (-beta * (E.array() - e0)).exp().sum();
  PartitionValue out;
  out.logZ = -beta * e0 + std::log(s);
  out.Z = std::exp(out.logZ);
  return out;
}

PartitionValue partition_function(const GlobalOperator& H, double beta) {
  return partition_from_spectrum(herm_eigenvalues(H.matrix), beta);
}

ThermalState gibbs_state(const Eigensystem& es, const Region& region, int q, double beta) {
  require_beta(beta);
  const double e0 = es.eigenvalues.minCoeff();
  RealVector w = (-beta * (es.eigenvalues.array() - e0)).exp().matrix();
  const double s = w.sum();
  w /= s;
  ThermalState st;
  st.region = region;
  st.beta = beta;
  st.rho = GlobalOperator(region, q, apply_spectral(es, w));
  st.logZ = -beta * e0 + std::log(s);
  return st;
}

ThermalState gibbs_state(const GlobalOperator& H, double beta) {
  return gibbs_state(herm_eig(H.matrix), H.region, H.q, beta);
}

cplx expectation(const ThermalState& state, const GlobalOperator& A) {
  if (A.region != state.region || A.q != state.rho.q) throw Error("expectation: observable acts on a different region");
  return trace_sparse_dense(sparse_of(A.matrix), state.rho.matrix);
}

cplx covariance(const ThermalState& state, const GlobalOperator& A, const GlobalOperator& B) {
  if (A.region != state.region || B.region != state.region || A.q != state.rho.q || B.q != state.rho.q) {
    throw Error("covariance: observables and state act on different regions");
  }
  const SparseMatrix As = sparse_of(A.matrix);
  const SparseMatrix Bs = sparse_of(B.matrix);
  const SparseMatrix AB = (As * Bs).pruned();
  const ComplexMatrix& rho = state.rho.matrix;
  return trace_sparse_dense(AB, rho) - trace_sparse_dense(As, rho) * trace_sparse_dense(Bs, rho);
}

Region template_support(const PauliTemplate& t, const Site& anchor) {
  std::vector<Site> sites;
  for (const auto& f : t) {
    if (f.offset.size() != anchor.dim()) throw ConfigError("observable offset has the wrong dimension");
    Site x = anchor;
    for (std::size_t k = 0; k < x.dim(); ++k) x.coords[k] += f.offset[k];
    sites.push_back(std::move(x));
  }
  Region R(sites);
  if (R.size() != sites.size()) throw ConfigError("observable template repeats a site");
  return R;
}

GlobalOperator place_template(const PauliTemplate& t, const Site& anchor) {
  const Region support = template_support(t, anchor);
  ComplexMatrix M = ComplexMatrix::Identity(static_cast<Eigen::Index>(hilbert_dim(2, support.size())),
                                            static_cast<Eigen::Index>(hilbert_dim(2, support.size())));
  for (const auto& f : t) {
    Site x = anchor;
    for (std::size_t k = 0; k < x.dim(); ++k) x.coords[k] += f.offset[k];
    M = M * embed(pauli::by_index(f.pauli), Region{x}, support, 2).matrix;
  }
  return GlobalOperator(support, 2, std::move(M));
}

DecayFit fit_decay(std::vector<DecayPoint> points, double floor) {
  DecayFit fit;
  fit.points = std::move(points);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (const auto& p : fit.points) {
    if (!(p.abs_cov > floor)) continue;
    const double x = p.distance;
    const double y = std::log(p.abs_cov);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  fit.points_used = n;
  if (n < 2) {
    throw Error("decay fit needs at least two covariances above " + std::to_string(floor) + ", got " +
                std::to_string(n));
  }
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (den == 0.0) throw Error("decay fit needs at least two distinct distances");
  fit.slope = (dn * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / dn;
  fit.xi = fit.slope < 0.0 ? -1.0 / fit.slope : std::numeric_limits<double>::infinity();
  return fit;
}

std::vector<DecayFit> decay_sweep(const HamiltonianSpec& spec, const std::vector<double>& betas,
                                  const PauliTemplate& A, const PauliTemplate& B, const Site& anchor,
                                  const std::vector<int>& distances, double floor) {
  if (spec.q != 2) throw ConfigError("Pauli observables need q = 2");
  if (betas.empty()) throw ConfigError("decay sweep needs at least one beta");
  const Region& lambda = spec.geometry.lambda;

  const GlobalOperator a_local = place_template(A, anchor);
  if (!lambda.includes(a_local.region)) throw ConfigError("observable A does not fit inside the lattice");
  const GlobalOperator A_full = embed(a_local, lambda);
  std::vector<GlobalOperator> B_full;
  for (int d : distances) {
    Site y = anchor;
    y.coords[0] += d;
    const GlobalOperator b_local = place_template(B, y);
    if (!lambda.includes(b_local.region)) {
      throw ConfigError("observable B at distance " + std::to_string(d) + " does not fit inside the lattice");
    }
    B_full.push_back(embed(b_local, lambda));
  }

  const auto H = build_restricted(spec, lambda).H;
  const Eigensystem es = herm_eig(H.matrix);
  std::vector<DecayFit> fits;
  for (double beta : betas) {
    const ThermalState st = gibbs_state(es, lambda, spec.q, beta);
    std::vector<DecayPoint> pts;
    for (std::size_t k = 0; k < distances.size(); ++k) {
      pts.push_back({distances[k], std::abs(covariance(st, A_full, B_full[k]))});
    }
    DecayFit fit;
    std::size_t usable = 0;
    for (const auto& p : pts) usable += p.abs_cov > floor ? 1 : 0;
    if (usable >= 2) {
      fit = fit_decay(std::move(pts), floor);
    } else {
      fit.points = std::move(pts);
      fit.points_used = usable;
      fit.degenerate = true;
      fit.slope = fit.intercept = std::numeric_limits<double>::quiet_NaN();
      fit.xi = std::numeric_limits<double>::infinity();
    }
    fit.beta = beta;
    fits.push_back(std::move(fit));
  }
  return fits;
}

GlobalOperator ising_chain_hamiltonian(int n, double J) {
  if (n < 2) throw Error("Ising chain needs at least two sites");
  const Region chain = chain_geometry(n, 1).lambda;
  const auto N = static_cast<Eigen::Index>(hilbert_dim(2, chain.size()));
  ComplexMatrix H = ComplexMatrix::Zero(N, N);
  const ComplexMatrix zz = kron(pauli::sigma3(), pauli::sigma3());
  for (int k = 0; k + 1 < n; ++k) embed_accumulate(H, zz, Region{Site{k}, Site{k + 1}}, chain, 2, -J);
  return GlobalOperator(chain, 2, std::move(H));
}

double ising_oracle(int n, double J, double beta, int i, int j) {
  if (!(0 <= i && i < j && j < n)) throw Error("ising_oracle: need 0 <= i < j < n");
  const GlobalOperator H = ising_chain_hamiltonian(n, J);
  const ThermalState st = gibbs_state(H, beta);
  const GlobalOperator A = embed(pauli::sigma3(), Region{Site{i}}, H.region, 2);
  const GlobalOperator B = embed(pauli::sigma3(), Region{Site{j}}, H.region, 2);
  return covariance(st, A, B).real();
}

double ising_closed_form(double J, double beta, int i, int j) {
  return std::pow(std::tanh(beta * J), j - i);
}

std::vector<HistogramBin> mbdos_histogram(const RealVector& eigenvalues, double bin_width) {
  if (!(bin_width > 0.0)) throw Error("bin width must be positive");
  std::map<long, long> counts;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    ++counts[std::lround(eigenvalues(k) / bin_width)];
  }
  std::vector<HistogramBin> out;
  if (counts.empty()) return out;
  for (long b = counts.begin()->first; b <= counts.rbegin()->first; ++b) {
    auto it = counts.find(b);
    out.push_back({static_cast<double>(b) * bin_width, it == counts.end() ? 0 : it->second});
  }
  return out;
}

std::vector<HistogramBin> mbdos_histogram(const GlobalOperator& H, double bin_width) {
  if (!(bin_width > 0.0)) throw Error("bin width must be positive");
  return mbdos_histogram(herm_eigenvalues(H.matrix), bin_width);
}

BoundCertificate bound_certificate(const HamiltonianSpec& spec, std::optional<double> ratio_constant) {
  const int D = spec.geometry.D;
  const int R = spec.geometry.R;
  const double cells = std::pow(2.0 * R + 1.0, D);
  BoundCertificate c;
  c.p = 2.0 * spec.a * std::pow(static_cast<double>(spec.q), cells);
  c.counting_constant = 2.0 * std::exp(1.0) * cells;
  c.ratio_constant = ratio_constant ? *ratio_constant : std::pow(static_cast<double>(spec.q), cells);
  c.decay_base = 2.0 * c.p * (1.0 + c.p) * c.counting_constant * c.ratio_constant * c.ratio_constant;
  c.prefactor_exponent = c.p > 0.0 ? std::log(0.5 + 0.5 / c.p) : std::numeric_limits<double>::infinity();
  c.active = c.decay_base < 1.0;
  return c;
}

double theorem_bound(const BoundCertificate& cert, int R, double normA, double normB, std::size_t sizeX,
                     std::size_t sizeY, int distance) {
  if (!cert.active) return std::numeric_limits<double>::infinity();
  // Free model: every nonempty configuration has weight zero and the covariance vanishes.
  if (cert.p == 0.0) return 0.0;
  const double k = static_cast<double>(distance) / (2.0 * R);
  return 2.0 * normA * normB * std::exp(cert.prefactor_exponent * static_cast<double>(sizeX + sizeY)) *
         std::pow(cert.decay_base, k) / (1.0 - cert.decay_base);
}

}  // namespace gdoc
