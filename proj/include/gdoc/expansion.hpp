#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gdoc/algebra.hpp"
#include "gdoc/model.hpp"

namespace gdoc {

/// A configuration is a subset of interior(Λ).
void require_configuration(const Region& I, const HamiltonianSpec& spec);

constexpr std::size_t kMaxTermSize = 20;

/// T^{base}_I = Σ_{M⊆I} (-1)^{|I|-|M|} exp(-β(H0_base + Σ_{x∈M} v_x)) on base ∪ closure(I).
struct YarotskyTerm {
  Region I;
  Region base;
  GlobalOperator matrix;
};

YarotskyTerm yarotsky_term(const Region& I, const Region& base, const HamiltonianSpec& spec, double beta);

/// Z0 of region S from the product of on-site traces.
double free_partition(const HamiltonianSpec& spec, const Region& S, double beta);

/// tr(T^{cl I}_I) / Z0_{cl I}; 1 for I = ∅.
double weight(const Region& I, const HamiltonianSpec& spec, double beta);
/// tr(O T^{cl I ∪ Ω}_I) / Z0_{cl I ∪ Ω} with Ω = O.region.
cplx observable_weight(const Region& I, const GlobalOperator& O, const HamiltonianSpec& spec, double beta);

/// ‖Σ_{I⊆int Λ} T_I - exp(-βH_Λ)‖_F / ‖exp(-βH_Λ)‖_F with T_I = exp(-βH0_{Λ∖cl I}) T^{cl I}_I.
double verify_resummation(const HamiltonianSpec& spec, double beta);

/// Relative difference between the joint observable weight of (I1 ∪ I2, O1 O2) and the product of
/// the separate ones. Throws if I1 ∪ Ω1 and I2 ∪ Ω2 are R-connected to each other.
double verify_factorization(const Region& I1, const GlobalOperator& O1, const Region& I2,
                            const GlobalOperator& O2, const HamiltonianSpec& spec, double beta);

enum class Origin : std::uint8_t { I = 1, J = 2, X = 4, Y = 8 };

struct SuperclusterDecomposition {
  std::vector<Region> components;
  std::map<Site, std::uint8_t> provenance;  // bitmask of Origin values per site
  /// Index of the component that holds x; throws if x is absent.
  std::size_t component_of(const Site& x) const;
};

SuperclusterDecomposition decompose_pair(const Region& I, const Region& J, const Region& X,
                                         const Region& Y, int R);
/// X and Y lie in different components of I ∪ J ∪ X ∪ Y.
bool event_separated(const Region& I, const Region& J, const Region& X, const Region& Y, int R);

/// Exchanges I and J inside the component S1 that holds X. Throws unless the event holds.
std::pair<Region, Region> swap_configurations(const Region& I, const Region& J, const Region& X,
                                              const Region& Y, int R);

constexpr std::size_t kMaxPairInterior = 6;

struct SwapReport {
  cplx lhs;                        // Σ_E w(I) ow(J; AB)
  cplx rhs;                        // Σ_E ow(I; A) ow(J; B)
  double residual = 0.0;           // relative difference of the two sums
  double max_pair_residual = 0.0;  // per-pair identity under the swap map
  std::size_t pairs = 0;           // total pairs enumerated
  std::size_t event_pairs = 0;     // pairs in E(X,Y)
  bool involution_ok = true;
  bool decomposition_invariant = true;
};

/// A acts on X, B on Y; both must be R-connected.
SwapReport verify_swap_identity(const HamiltonianSpec& spec, const GlobalOperator& A, const GlobalOperator& B,
                                double beta);

struct SuperclusterReport {
  cplx lhs_joint, rhs_joint;      // the w(I) ow(J; AB) class sum and its ratio formula
  cplx lhs_split, rhs_split;      // the ow(I; A) ow(J; B) class sum and its ratio formula
  double ratio_factor = 0.0;      // Z_{Λ∖cl S0} / Z0_{Λ∖cl S0}
  double ratio_by_weights = 0.0;  // Σ_{I'} w(I') over interior(Λ∖cl S0)
  std::size_t class_size = 0;
  double residual_joint = 0.0;
  double residual_split = 0.0;
  double residual_ratio = 0.0;
};

/// Enumerates the class C_{I0,J0} by its definition and compares with the ratio formula.
SuperclusterReport verify_supercluster_resummation(const Region& I0, const Region& J0, const GlobalOperator& A,
                                                   const GlobalOperator& B, const HamiltonianSpec& spec,
                                                   double beta);

struct PartitionRatio {
  double ratio = 0.0;                 // Z_{Λ∖cl S} Z0_{cl S} / Z_Λ
  double bound = 0.0;                 // C^{|S|}, C = q^{(2R+1)^D}
  bool bound_ok = false;
  double Z_closure = 0.0;             // Z_{cl S}
  bool ground_link_ok = false;        // Z_{cl S} >= 1 - 1e-9
  double monotone_gap = 0.0;          // log Z_Λ - log(Z_{Λ∖cl S} Z_{cl S})
  bool monotone_link_ok = false;      // gap >= -1e-12
};

/// Requires an R-connected S and a spec with every v_x <= 0.
PartitionRatio partition_ratio(const Region& S, const HamiltonianSpec& spec, double beta);
/// q^{(2R+1)^D}
double ratio_constant(const HamiltonianSpec& spec);

/// Σ_{E⊆F} p^{|E|} by explicit enumeration, and (1+p)^{|F|}.
std::pair<double, double> subset_sum_identity_check(int F_size, double p);

struct CovarianceCheck {
  cplx expansion;
  cplx direct;
  double residual = 0.0;  // relative, denominator floored at the numerical floor
};

/// (Z0/Z)² (Σ_I w(I) Σ_J ow(J; AB) - Σ_I ow(I; A) Σ_J ow(J; B)) against the direct covariance.
CovarianceCheck covariance_from_expansion(const HamiltonianSpec& spec, const GlobalOperator& A,
                                          const GlobalOperator& B, double beta);

struct NormBoundEntry {
  Region I;
  double norm = 0.0;
  double bound = 0.0;  // (2a)^{|I|}
};

/// Every I ⊆ interior(Λ) with |I| <= max_size.
std::vector<NormBoundEntry> norm_bound_scan(const HamiltonianSpec& spec, double beta, std::size_t max_size);

/// All subsets of `base` in mask order (bit k selects base[k]).
std::vector<Region> all_subsets(const Region& base, std::size_t cap = 20);

}  // namespace gdoc
