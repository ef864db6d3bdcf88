#include "gdoc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "gdoc/random.hpp"

namespace gdoc {

namespace {

double max_eigenvalue(const ComplexMatrix& M) {
  const RealVector ev = herm_eigenvalues(M);
  return ev(ev.size() - 1);
}

// Local H0 on B_R(center) with the ball's own basis.
ComplexMatrix local_free(const HamiltonianSpec& spec, const Region& support) {
  return onsite_sum(spec, support, support);
}

void fill_metadata(HamiltonianSpec& spec) {
  spec.h_sup = 0.0;
  for (const auto& [x, h] : spec.onsite) spec.h_sup = std::max(spec.h_sup, op_norm(h.matrix));
  spec.v_sup = 0.0;
  spec.nonpositive = true;
  for (const auto& [x, v] : spec.interactions) {
    spec.v_sup = std::max(spec.v_sup, op_norm(v.matrix));
    if (max_eigenvalue(v.matrix) > kKernelTolerance) spec.nonpositive = false;
  }
}

void certify_all(HamiltonianSpec& spec) {
  spec.local_a.clear();
  spec.a = 0.0;
  for (const auto& [x, v] : spec.interactions) {
    const FormBound fb = certify_form_bound(v, spec);
    if (!fb.finite) {
      throw CertificationError("interaction at centre " + to_string(x) +
                                   " couples the ground state of H0 (kernel coupling " +
                                   std::to_string(fb.kernel_coupling) + "); no finite form bound",
                               x);
    }
    spec.local_a[x] = fb.a;
    spec.a = std::max(spec.a, fb.a);
  }
}

}  // namespace

std::size_t HamiltonianSpec::ball_size() const {
  return zd_ball(Site(std::vector<int>(static_cast<std::size_t>(geometry.D), 0)), geometry.R).size();
}

Region HamiltonianSpec::interaction_centers() const {
  std::vector<Site> out;
  for (const auto& [x, v] : interactions) out.push_back(x);
  return Region(std::move(out));
}

bool gap_check(const OnSiteTerm& h) {
  if (!is_hermitian(h.matrix)) return false;
  const RealVector ev = herm_eigenvalues(h.matrix);
  if (std::abs(ev(0)) > 1e-10) return false;
  if (ev.size() == 1) return true;
  return ev(1) >= 1.0 - 1e-10;
}

FormBound certify_form_bound(const InteractionTerm& v, const HamiltonianSpec& spec) {
  const Region& B = v.support;
  if (B != ball(v.center, spec.geometry.R, spec.geometry, BallMode::unclipped)) {
    throw Error("interaction at " + to_string(v.center) + " must act on the full ball B_R(x) inside the lattice");
  }
  const ComplexMatrix K = local_free(spec, B) / static_cast<double>(B.size());
  const Eigensystem es = herm_eig(K);
  const ComplexMatrix W = es.vectors.adjoint() * ((v.matrix + v.matrix.adjoint()) * 0.5) * es.vectors;

  const Eigen::Index n = K.rows();
  Eigen::Index k0 = 0;
  while (k0 < n && es.eigenvalues(k0) <= 1e-10) ++k0;

  FormBound fb;
  if (k0 > 0) {
    const double kk = op_norm(W.topLeftCorner(k0, k0));
    double kr = 0.0;
    if (k0 < n) {
      const ComplexMatrix C = W.topRightCorner(k0, n - k0);
      kr = std::sqrt(std::max(0.0, herm_eigenvalues(C * C.adjoint())(k0 - 1)));
    }
    fb.kernel_coupling = std::max(kk, kr);
    if (fb.kernel_coupling > kKernelTolerance) {
      fb.finite = false;
      return fb;
    }
  }
  fb.finite = true;
  if (k0 == n) return fb;
  const RealVector s = es.eigenvalues.tail(n - k0).array().rsqrt().matrix();
  const ComplexMatrix P = s.asDiagonal() * W.bottomRightCorner(n - k0, n - k0) * s.asDiagonal();
  fb.a = op_norm(P);
  return fb;
}

HamiltonianSpec make_spec(LatticeGeometry geometry, int q, std::vector<OnSiteTerm> onsite,
                          std::vector<InteractionTerm> interactions, std::optional<double> claimed_a) {
  hilbert_dim(q, 0);
  HamiltonianSpec spec{std::move(geometry), q, {}, {}, 0.0, {}, 0.0, 0.0, false};
  const auto& geo = spec.geometry;
  const auto dq = static_cast<Eigen::Index>(q);

  for (auto& h : onsite) {
    if (!geo.lambda.contains(h.site)) throw ConfigError("on-site term at " + to_string(h.site) + " outside the lattice");
    if (h.matrix.rows() != dq || h.matrix.cols() != dq) {
      throw ConfigError("on-site term at " + to_string(h.site) + " must be " + std::to_string(q) + "x" + std::to_string(q));
    }
    if (!gap_check(h)) {
      throw CertificationError("on-site term at " + to_string(h.site) +
                                   " needs a simple ground state at 0 and a gap of at least 1",
                               h.site);
    }
    const Site x = h.site;
    if (!spec.onsite.emplace(x, std::move(h)).second) {
      throw ConfigError("duplicate on-site term at " + to_string(x));
    }
  }
  for (const auto& x : geo.lambda) {
    if (!spec.onsite.contains(x)) throw ConfigError("missing on-site term at " + to_string(x));
  }

  const Region inner = interior(geo.lambda, geo);
  for (auto& v : interactions) {
    const Site x = v.center;
    if (!inner.contains(x)) {
      throw ConfigError("interaction centre " + to_string(x) + " is not in the interior of the lattice");
    }
    const Region B = ball(x, geo.R, geo);
    if (v.support.empty()) v.support = B;
    if (v.support != B) throw ConfigError("interaction at " + to_string(x) + " must act on B_R(x)");
    const auto d = static_cast<Eigen::Index>(hilbert_dim(q, B.size()));
    if (v.matrix.rows() != d || v.matrix.cols() != d) {
      throw ConfigError("interaction at " + to_string(x) + " has the wrong dimension");
    }
    if (!is_hermitian(v.matrix)) throw ConfigError("interaction at " + to_string(x) + " is not Hermitian");
    if (!spec.interactions.emplace(x, std::move(v)).second) {
      throw ConfigError("duplicate interaction centre " + to_string(x));
    }
  }

  certify_all(spec);
  for (const auto& [x, ax] : spec.local_a) {
    if (ax >= 1.0 || (claimed_a && ax > *claimed_a + 1e-12)) {
      std::ostringstream os;
      os << "form bound at centre " << to_string(x) << " is a' = " << ax;
      if (ax >= 1.0) os << ", not below 1";
      else os << ", above the claimed a = " << *claimed_a;
      throw CertificationError(os.str(), x);
    }
  }
  fill_metadata(spec);
  return spec;
}

ComplexMatrix onsite_sum(const HamiltonianSpec& spec, const Region& sites, const Region& target) {
  const auto N = static_cast<Eigen::Index>(hilbert_dim(spec.q, target.size()));
  ComplexMatrix out = ComplexMatrix::Zero(N, N);
  for (const auto& x : sites) {
    auto it = spec.onsite.find(x);
    if (it == spec.onsite.end()) throw Error("no on-site term at " + to_string(x));
    embed_accumulate(out, it->second.matrix, Region{x}, target, spec.q);
  }
  return out;
}

ComplexMatrix interaction_sum(const HamiltonianSpec& spec, const Region& centers, const Region& target) {
  const auto N = static_cast<Eigen::Index>(hilbert_dim(spec.q, target.size()));
  ComplexMatrix out = ComplexMatrix::Zero(N, N);
  for (const auto& x : centers) {
    auto it = spec.interactions.find(x);
    if (it == spec.interactions.end()) continue;  // v_x = 0
    embed_accumulate(out, it->second.matrix, it->second.support, target, spec.q);
  }
  return out;
}

Region centers_within(const HamiltonianSpec& spec, const Region& S) {
  std::vector<Site> out;
  for (const auto& [x, v] : spec.interactions) {
    if (S.includes(v.support)) out.push_back(x);
  }
  return Region(std::move(out));
}

RestrictedHamiltonian build_restricted(const HamiltonianSpec& spec, const Region& S) {
  if (!spec.geometry.lambda.includes(S)) throw Error("build_restricted: region is not contained in the lattice");
  GlobalOperator H0(S, spec.q, onsite_sum(spec, S, S));
  GlobalOperator V(S, spec.q, interaction_sum(spec, centers_within(spec, S), S));
  GlobalOperator H(S, spec.q, H0.matrix + V.matrix);
  return {std::move(H0), std::move(V), std::move(H)};
}

std::vector<double> disorder_draws(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 engine(derive_seed(seed, "disorder"));
  std::vector<double> out(n);
  for (auto& w : out) w = uniform01(engine);
  return out;
}

std::vector<Coupling> nearest_neighbour_couplings(const Region& extent, cplx J) {
  std::vector<Coupling> out;
  for (std::size_t i = 0; i < extent.size(); ++i) {
    for (std::size_t j = i + 1; j < extent.size(); ++j) {
      if (l1_distance(extent[i], extent[j]) == 1) out.push_back({extent[i], extent[j], J});
    }
  }
  return out;
}

HamiltonianSpec xxz_spec(const Region& extent, const XxzParams& params) {
  if (extent.empty()) throw ConfigError("xxz: empty lattice");
  if (params.lambda < 0.0) throw ConfigError("xxz: lambda must be nonnegative");
  LatticeGeometry geo(static_cast<int>(extent[0].dim()), params.R, extent);
  const int q = 2;

  const auto omega = disorder_draws(params.seed, extent.size());
  std::vector<OnSiteTerm> onsite;
  for (std::size_t i = 0; i < extent.size(); ++i) {
    onsite.push_back({extent[i], (1.0 + params.lambda * omega[i]) * pauli::number()});
  }

  // Ordered coupling maps; the missing direction is the complex conjugate.
  auto ordered = [&](const std::vector<Coupling>& list, const char* name) {
    std::map<std::pair<Site, Site>, cplx> m;
    for (const auto& c : list) {
      if (!extent.contains(c.x) || !extent.contains(c.y)) {
        throw ConfigError(std::string("xxz: ") + name + " coupling references a site outside the lattice");
      }
      if (c.x == c.y) throw ConfigError(std::string("xxz: ") + name + " coupling on the diagonal x = y");
      if (l1_distance(c.x, c.y) > params.R) {
        throw ConfigError(std::string("xxz: ") + name + " coupling between " + to_string(c.x) + " and " +
                          to_string(c.y) + " exceeds the range R = " + std::to_string(params.R));
      }
      if (!m.emplace(std::make_pair(c.x, c.y), c.J).second) {
        throw ConfigError(std::string("xxz: duplicate ") + name + " coupling");
      }
    }
    std::map<std::pair<Site, Site>, cplx> pair_coeff;  // key with x < y
    for (const auto& [key, J] : m) {
      const auto& [x, y] = key;
      auto rev = m.find({y, x});
      cplx Jr = std::conj(J);
      if (rev != m.end()) {
        if (std::abs(rev->second - std::conj(J)) > 1e-12) {
          throw ConfigError(std::string("xxz: ") + name + " coupling map is not self-adjoint");
        }
        Jr = rev->second;
      }
      pair_coeff[{std::min(x, y), std::max(x, y)}] = J + Jr;
    }
    return pair_coeff;
  };
  const auto c12 = ordered(params.J12, "J12");
  const auto c3 = ordered(params.J3, "J3");

  const Region inner = interior(extent, geo);
  auto centre_of = [&](const Site& x, const Site& y) {
    if (inner.contains(x)) return x;
    for (const auto& c : inner) {
      if (l1_distance(c, x) <= params.R && l1_distance(c, y) <= params.R) return c;
    }
    throw ConfigError("xxz: no interior site whose R-ball holds both " + to_string(x) + " and " + to_string(y));
  };

  const ComplexMatrix hop = kron(pauli::sigma_plus(), pauli::sigma_minus()) +
                            kron(pauli::sigma_minus(), pauli::sigma_plus());
  const ComplexMatrix nn = kron(pauli::number(), pauli::number());

  std::map<Site, ComplexMatrix> local;
  auto add_pair = [&](const Site& x, const Site& y, cplx c, const ComplexMatrix& op) {
    if (c == cplx(0.0, 0.0)) return;
    const Site ctr = centre_of(x, y);
    const Region B = ball(ctr, params.R, geo);
    auto [it, fresh] = local.try_emplace(ctr);
    if (fresh) {
      const auto d = static_cast<Eigen::Index>(hilbert_dim(q, B.size()));
      it->second = ComplexMatrix::Zero(d, d);
    }
    embed_accumulate(it->second, op, Region{x, y}, B, q, c);
  };
  for (const auto& [key, c] : c12) add_pair(key.first, key.second, c, hop);
  for (const auto& [key, c] : c3) add_pair(key.first, key.second, c, nn);

  std::vector<InteractionTerm> terms;
  for (auto& [ctr, M] : local) terms.push_back({ctr, ball(ctr, params.R, geo), std::move(M)});
  return make_spec(std::move(geo), q, std::move(onsite), std::move(terms), params.claimed_a);
}

HamiltonianSpec normalize_nonpositive(const HamiltonianSpec& spec) {
  const auto& geo = spec.geometry;
  const double at = spec.a / static_cast<double>(spec.ball_size());
  HamiltonianSpec out = spec;
  std::map<Site, int> count;
  for (const auto& x : interior(geo.lambda, geo)) {
    const Region B = ball(x, geo.R, geo);
    for (const auto& y : B) ++count[y];
    ComplexMatrix v = -at * onsite_sum(spec, B, B);
    if (auto it = spec.interactions.find(x); it != spec.interactions.end()) v += it->second.matrix;
    out.interactions.insert_or_assign(x, InteractionTerm{x, B, std::move(v)});
  }
  for (auto& [y, h] : out.onsite) h.matrix = (1.0 + at * count[y]) * spec.onsite.at(y).matrix;
  certify_all(out);
  fill_metadata(out);
  return out;
}

double bracket_violation(const HamiltonianSpec& spec, const Region& S) {
  const auto rh = build_restricted(spec, S);
  const RealVector E = herm_eigenvalues(rh.H.matrix);
  const RealVector E0 = herm_eigenvalues(rh.H0.matrix);
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < E.size(); ++j) {
    worst = std::max(worst, (1.0 - spec.a) * E0(j) - E(j));
    worst = std::max(worst, E(j) - (1.0 + spec.a) * E0(j));
  }
  return worst;
}

}  // namespace gdoc
