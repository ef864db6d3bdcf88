#include "gdoc/expansion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "gdoc/error.hpp"
#include "gdoc/gibbs.hpp"
#include "gdoc/parallel.hpp"
#include "gdoc/precision.hpp"

namespace gdoc {

namespace {

std::uint64_t mask_of(const Region& sub, const Region& base) {
  std::uint64_t m = 0;
  for (const auto& x : sub) {
    auto p = base.position(x);
    if (!p) throw Error("mask_of: site " + to_string(x) + " is outside the base set");
    m |= std::uint64_t{1} << *p;
  }
  return m;
}

Region subset_of(std::uint64_t mask, const Region& base) {
  std::vector<Site> out;
  for (std::size_t k = 0; k < base.size(); ++k) {
    if (mask >> k & 1U) out.push_back(base[k]);
  }
  return Region(std::move(out));
}

double log_partition(const HamiltonianSpec& spec, const Region& S, double beta) {
  return partition_function(build_restricted(spec, S).H, beta).logZ;
}

unsigned term_bits(const HamiltonianSpec& spec, double beta, std::size_t order) {
  return required_bits(beta, order, spec.h_sup, spec.a);
}

AlternatingExponentials term_sums(const Region& I, const Region& base, const HamiltonianSpec& spec, double beta,
                                  Region* target_out = nullptr) {
  require_configuration(I, spec);
  if (I.size() > kMaxTermSize) {
    throw SizeCapError("inclusion-exclusion over |I| = " + std::to_string(I.size()) + " exceeds the cap of " +
                       std::to_string(kMaxTermSize));
  }
  if (!spec.geometry.lambda.includes(base)) throw Error("yarotsky_term: base region is not inside the lattice");
  const Region target = base | closure(I, spec.geometry);
  std::vector<ComplexMatrix> v;
  for (const auto& x : I) v.push_back(interaction_sum(spec, Region{x}, target));
  if (target_out) *target_out = target;
  return AlternatingExponentials(onsite_sum(spec, base, target), v, beta, term_bits(spec, beta, I.size()), false);
}

// Per-subset weights with observables, computed in parallel into fixed slots.
struct WeightTable {
  std::vector<double> w;
  std::vector<cplx> a, b, ab;
};

WeightTable weight_table(const std::vector<Region>& configs, const GlobalOperator& A, const GlobalOperator& B,
                         const HamiltonianSpec& spec, double beta);

}  // namespace

void require_configuration(const Region& I, const HamiltonianSpec& spec) {
  const auto& geo = spec.geometry;
  if (!geo.lambda.includes(I) || interior(I, geo) != I) {
    throw Error("configuration must be a subset of the interior of the lattice");
  }
}

std::vector<Region> all_subsets(const Region& base, std::size_t cap) {
  if (base.size() > cap) {
    throw SizeCapError("subset enumeration over " + std::to_string(base.size()) + " sites exceeds the cap of " +
                       std::to_string(cap));
  }
  std::vector<Region> out;
  const std::uint64_t n = std::uint64_t{1} << base.size();
  out.reserve(n);
  for (std::uint64_t m = 0; m < n; ++m) out.push_back(subset_of(m, base));
  return out;
}

YarotskyTerm yarotsky_term(const Region& I, const Region& base, const HamiltonianSpec& spec, double beta) {
  Region target;
  const AlternatingExponentials T = term_sums(I, base, spec, beta, &target);
  const std::uint64_t full = (std::uint64_t{1} << I.size()) - 1;
  return {I, base, GlobalOperator(target, spec.q, T.matrix(full))};
}

double free_partition(const HamiltonianSpec& spec, const Region& S, double beta) {
  double z = 1.0;
  for (const auto& x : S) {
    const RealVector ev = herm_eigenvalues(spec.onsite.at(x).matrix);
    z *= (-beta * ev.array()).exp().sum();
  }
  return z;
}

double weight(const Region& I, const HamiltonianSpec& spec, double beta) {
  const Region cl = closure(I, spec.geometry);
  const AlternatingExponentials T = term_sums(I, cl, spec, beta);
  return T.trace((std::uint64_t{1} << I.size()) - 1).real() / free_partition(spec, cl, beta);
}

cplx observable_weight(const Region& I, const GlobalOperator& O, const HamiltonianSpec& spec, double beta) {
  if (!spec.geometry.lambda.includes(O.region)) throw Error("observable support is not inside the lattice");
  if (O.q != spec.q) throw Error("observable has the wrong local dimension");
  const Region base = closure(I, spec.geometry) | O.region;
  const AlternatingExponentials T = term_sums(I, base, spec, beta);
  return T.trace_product(embed(O, base).matrix, (std::uint64_t{1} << I.size()) - 1) /
         free_partition(spec, base, beta);
}

namespace {

WeightTable weight_table(const std::vector<Region>& configs, const GlobalOperator& A, const GlobalOperator& B,
                         const HamiltonianSpec& spec, double beta) {
  const GlobalOperator AB = product(A, B);
  WeightTable t;
  const std::size_t n = configs.size();
  t.w.resize(n);
  t.a.resize(n);
  t.b.resize(n);
  t.ab.resize(n);
  parallel_for(n, [&](std::size_t i) {
    t.w[i] = weight(configs[i], spec, beta);
    t.a[i] = observable_weight(configs[i], A, spec, beta);
    t.b[i] = observable_weight(configs[i], B, spec, beta);
    t.ab[i] = observable_weight(configs[i], AB, spec, beta);
  });
  return t;
}

}  // namespace

double verify_resummation(const HamiltonianSpec& spec, double beta) {
  const auto& geo = spec.geometry;
  const Region inner = interior(geo.lambda, geo);
  if (inner.size() > 12) {
    throw SizeCapError("resummation check needs |interior| <= 12, got " + std::to_string(inner.size()));
  }
  const auto configs = all_subsets(inner);
  std::vector<ComplexMatrix> terms(configs.size());
  parallel_for(configs.size(), [&](std::size_t i) {
    const Region& I = configs[i];
    const Region cl = closure(I, geo);
    const Region rest = geo.lambda - cl;
    const GlobalOperator outside(rest, spec.q, herm_exp(onsite_sum(spec, rest, rest), -beta));
    const YarotskyTerm T = yarotsky_term(I, cl, spec, beta);
    terms[i] = tensor(outside, T.matrix).matrix;
  });
  ComplexMatrix sum = ComplexMatrix::Zero(terms[0].rows(), terms[0].cols());
  for (const auto& t : terms) sum += t;
  const ComplexMatrix direct = herm_exp(build_restricted(spec, geo.lambda).H.matrix, -beta);
  return relative_residual(sum, direct);
}

double verify_factorization(const Region& I1, const GlobalOperator& O1, const Region& I2,
                            const GlobalOperator& O2, const HamiltonianSpec& spec, double beta) {
  const int R = spec.geometry.R;
  if (r_connected(I1 | O1.region, I2 | O2.region, R)) {
    throw Error("factorization needs I1 ∪ Ω1 and I2 ∪ Ω2 not R-connected to each other");
  }
  require_configuration(I1, spec);
  require_configuration(I2, spec);
  const cplx joint = observable_weight(I1 | I2, tensor(O1, O2), spec, beta);
  const cplx split = observable_weight(I1, O1, spec, beta) * observable_weight(I2, O2, spec, beta);
  return relative_residual(joint, split);
}

std::size_t SuperclusterDecomposition::component_of(const Site& x) const {
  for (std::size_t k = 0; k < components.size(); ++k) {
    if (components[k].contains(x)) return k;
  }
  throw Error("site " + to_string(x) + " is not in the decomposition");
}

SuperclusterDecomposition decompose_pair(const Region& I, const Region& J, const Region& X, const Region& Y,
                                         int R) {
  const Region parts[] = {I, J, X, Y};
  SuperclusterDecomposition d;
  d.components = supercluster_decompose(parts, R);
  const Origin tags[] = {Origin::I, Origin::J, Origin::X, Origin::Y};
  for (std::size_t k = 0; k < 4; ++k) {
    for (const auto& x : parts[k]) d.provenance[x] |= static_cast<std::uint8_t>(tags[k]);
  }
  return d;
}

bool event_separated(const Region& I, const Region& J, const Region& X, const Region& Y, int R) {
  if (X.empty() || Y.empty()) throw Error("X and Y must be nonempty");
  const auto d = decompose_pair(I, J, X, Y, R);
  const std::size_t cx = d.component_of(X[0]);
  const Region& S1 = d.components[cx];
  return S1.includes(X) && (S1 & Y).empty();
}

std::pair<Region, Region> swap_configurations(const Region& I, const Region& J, const Region& X, const Region& Y,
                                              int R) {
  if (!event_separated(I, J, X, Y, R)) throw Error("swap needs X and Y in different superclusters");
  const auto d = decompose_pair(I, J, X, Y, R);
  const Region& S1 = d.components[d.component_of(X[0])];
  return {(J & S1) | (I - S1), (I & S1) | (J - S1)};
}

SwapReport verify_swap_identity(const HamiltonianSpec& spec, const GlobalOperator& A, const GlobalOperator& B,
                                double beta) {
  const auto& geo = spec.geometry;
  const int R = geo.R;
  const Region& X = A.region;
  const Region& Y = B.region;
  if (!is_r_connected(X, R) || !is_r_connected(Y, R)) throw Error("X and Y must each be R-connected");
  const Region inner = interior(geo.lambda, geo);
  if (inner.size() > kMaxPairInterior) {
    throw SizeCapError("pair enumeration needs |interior| <= " + std::to_string(kMaxPairInterior) + ", got " +
                       std::to_string(inner.size()));
  }
  const auto configs = all_subsets(inner);
  const WeightTable t = weight_table(configs, A, B, spec, beta);

  SwapReport rep;
  rep.lhs = rep.rhs = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    for (std::size_t j = 0; j < configs.size(); ++j) {
      ++rep.pairs;
      const Region& I = configs[i];
      const Region& J = configs[j];
      if (!event_separated(I, J, X, Y, R)) continue;
      ++rep.event_pairs;
      const cplx left = t.w[i] * t.ab[j];
      rep.lhs += left;
      rep.rhs += t.a[i] * t.b[j];

      const auto [Ip, Jp] = swap_configurations(I, J, X, Y, R);
      const auto back = swap_configurations(Ip, Jp, X, Y, R);
      if (back.first != I || back.second != J) rep.involution_ok = false;
      if (decompose_pair(Ip, Jp, X, Y, R).components != decompose_pair(I, J, X, Y, R).components) {
        rep.decomposition_invariant = false;
      }
      const std::size_t ip = mask_of(Ip, inner);
      const std::size_t jp = mask_of(Jp, inner);
      const cplx right = t.a[ip] * t.b[jp];
      rep.max_pair_residual = std::max(rep.max_pair_residual, relative_residual(left, right));
    }
  }
  rep.residual = relative_residual(rep.lhs, rep.rhs);
  return rep;
}

SuperclusterReport verify_supercluster_resummation(const Region& I0, const Region& J0, const GlobalOperator& A,
                                                   const GlobalOperator& B, const HamiltonianSpec& spec,
                                                   double beta) {
  const auto& geo = spec.geometry;
  const int R = geo.R;
  const Region& X = A.region;
  const Region& Y = B.region;
  require_configuration(I0, spec);
  require_configuration(J0, spec);
  const Region S0 = I0 | J0 | X | Y;
  if (!is_r_connected(S0, R)) throw Error("S0 = I0 ∪ J0 ∪ X ∪ Y must be R-connected");

  const Region outer = geo.lambda - closure(S0, geo);
  const LatticeGeometry outer_geo(geo.D, R, outer);
  const Region outer_inner = interior(outer, outer_geo);
  if (outer_inner.size() > kMaxPairInterior) {
    throw SizeCapError("|interior(Λ∖cl S0)| must be <= " + std::to_string(kMaxPairInterior));
  }
  std::vector<Site> far;
  for (const auto& x : interior(geo.lambda, geo)) {
    if (!r_connected(Region{x}, S0, R)) far.push_back(x);
  }
  const Region free(std::move(far));
  if (free.size() > 8) throw SizeCapError("pair class enumeration over more than 8 free sites");

  // Candidates I = I0 ∪ I', J = J0 ∪ J' with I', J' not R-connected to S0; the class keeps those whose
  // decomposition has S0 as a component.
  const auto extras = all_subsets(free);
  std::vector<Region> Is, Js;
  for (const auto& e : extras) {
    Is.push_back(I0 | e);
    Js.push_back(J0 | e);
  }
  const GlobalOperator AB = product(A, B);
  std::vector<double> wI(extras.size());
  std::vector<cplx> aI(extras.size()), abJ(extras.size()), bJ(extras.size());
  parallel_for(extras.size(), [&](std::size_t k) {
    wI[k] = weight(Is[k], spec, beta);
    aI[k] = observable_weight(Is[k], A, spec, beta);
    abJ[k] = observable_weight(Js[k], AB, spec, beta);
    bJ[k] = observable_weight(Js[k], B, spec, beta);
  });

  SuperclusterReport rep;
  rep.lhs_joint = rep.lhs_split = 0.0;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    for (std::size_t j = 0; j < extras.size(); ++j) {
      const auto d = decompose_pair(Is[i], Js[j], X, Y, R);
      if (std::find(d.components.begin(), d.components.end(), S0) == d.components.end()) continue;
      ++rep.class_size;
      rep.lhs_joint += wI[i] * abJ[j];
      rep.lhs_split += aI[i] * bJ[j];
    }
  }

  const double z_outer = std::exp(log_partition(spec, outer, beta));
  rep.ratio_factor = z_outer / free_partition(spec, outer, beta);
  rep.ratio_by_weights = 0.0;
  for (const auto& Ip : all_subsets(outer_inner)) rep.ratio_by_weights += weight(Ip, spec, beta);

  const double r2 = rep.ratio_factor * rep.ratio_factor;
  rep.rhs_joint = wI[0] * abJ[0] * r2;
  rep.rhs_split = aI[0] * bJ[0] * r2;
  rep.residual_joint = relative_residual(rep.lhs_joint, rep.rhs_joint);
  rep.residual_split = relative_residual(rep.lhs_split, rep.rhs_split);
  rep.residual_ratio = relative_residual(rep.ratio_by_weights, rep.ratio_factor);
  return rep;
}

double ratio_constant(const HamiltonianSpec& spec) {
  return std::pow(static_cast<double>(spec.q), std::pow(2.0 * spec.geometry.R + 1.0, spec.geometry.D));
}

PartitionRatio partition_ratio(const Region& S, const HamiltonianSpec& spec, double beta) {
  const auto& geo = spec.geometry;
  if (!is_r_connected(S, geo.R)) throw Error("partition_ratio needs an R-connected S");
  if (!spec.nonpositive) throw Error("partition_ratio needs a normalized spec with every v_x <= 0");
  const Region cl = closure(S, geo);
  const Region rest = geo.lambda - cl;
  const double log_rest = log_partition(spec, rest, beta);
  const double log_cl = log_partition(spec, cl, beta);
  const double log_all = log_partition(spec, geo.lambda, beta);
  const double log_free_cl = std::log(free_partition(spec, cl, beta));

  PartitionRatio out;
  out.ratio = std::exp(log_rest + log_free_cl - log_all);
  out.bound = std::pow(ratio_constant(spec), static_cast<double>(S.size()));
  out.bound_ok = out.ratio <= out.bound;
  out.Z_closure = std::exp(log_cl);
  out.ground_link_ok = out.Z_closure >= 1.0 - 1e-9;
  out.monotone_gap = log_all - (log_rest + log_cl);
  out.monotone_link_ok = out.monotone_gap >= -1e-12;
  return out;
}

std::pair<double, double> subset_sum_identity_check(int F_size, double p) {
  if (F_size < 0 || F_size > 20) throw SizeCapError("subset identity check needs 0 <= |F| <= 20");
  double lhs = 0.0;
  const std::uint64_t n = std::uint64_t{1} << F_size;
  for (std::uint64_t m = 0; m < n; ++m) lhs += std::pow(p, std::popcount(m));
  return {lhs, std::pow(1.0 + p, F_size)};
}

CovarianceCheck covariance_from_expansion(const HamiltonianSpec& spec, const GlobalOperator& A,
                                          const GlobalOperator& B, double beta) {
  const auto& geo = spec.geometry;
  const Region inner = interior(geo.lambda, geo);
  if (inner.size() > kMaxPairInterior) {
    throw SizeCapError("covariance expansion needs |interior| <= " + std::to_string(kMaxPairInterior));
  }
  const auto configs = all_subsets(inner);
  const WeightTable t = weight_table(configs, A, B, spec, beta);
  double sw = 0.0;
  cplx sa = 0.0, sb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    sw += t.w[i];
    sa += t.a[i];
    sb += t.b[i];
    sab += t.ab[i];
  }
  const GlobalOperator H = build_restricted(spec, geo.lambda).H;
  const ThermalState st = gibbs_state(H, beta);
  const double z_over_z0 = std::exp(st.logZ) / free_partition(spec, geo.lambda, beta);

  CovarianceCheck c;
  c.expansion = (sw * sab - sa * sb) / (z_over_z0 * z_over_z0);
  c.direct = covariance(st, embed(A, geo.lambda), embed(B, geo.lambda));
  c.residual = relative_residual(c.expansion, c.direct, kNumericalFloor);
  return c;
}

std::vector<NormBoundEntry> norm_bound_scan(const HamiltonianSpec& spec, double beta, std::size_t max_size) {
  const auto& geo = spec.geometry;
  std::vector<Region> configs;
  for (auto& I : all_subsets(interior(geo.lambda, geo))) {
    if (I.size() <= max_size) configs.push_back(std::move(I));
  }
  std::vector<NormBoundEntry> out(configs.size());
  parallel_for(configs.size(), [&](std::size_t k) {
    const Region& I = configs[k];
    const YarotskyTerm T = yarotsky_term(I, closure(I, geo), spec, beta);
    out[k] = {I, op_norm(T.matrix.matrix), std::pow(2.0 * spec.a, static_cast<double>(I.size()))};
  });
  return out;
}

}  // namespace gdoc
