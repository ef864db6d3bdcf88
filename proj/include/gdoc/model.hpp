#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "gdoc/algebra.hpp"
#include "gdoc/error.hpp"
#include "gdoc/lattice.hpp"

namespace gdoc {

/// h_x: PSD, simple ground state at 0, gap at least 1.
struct OnSiteTerm {
  Site site;
  ComplexMatrix matrix;
};

/// v_x acting on B_R(center).
struct InteractionTerm {
  Site center;
  Region support;
  ComplexMatrix matrix;
};

/// Raised when a term is outside the model class. `center` names the offending site.
class CertificationError : public Error {
 public:
  CertificationError(const std::string& what, Site center) : Error(what), center_(std::move(center)) {}
  const Site& center() const { return center_; }

 private:
  Site center_;
};

struct FormBound {
  bool finite = false;
  double a = 0.0;                // least a' with -a'K <= v <= a'K, K = H0_{B_R(x)} / |B_R|
  double kernel_coupling = 0.0;  // max of ‖P0 v P0‖, ‖P0 v (1-P0)‖
};

struct HamiltonianSpec {
  LatticeGeometry geometry;
  int q = 2;
  std::map<Site, OnSiteTerm> onsite;
  std::map<Site, InteractionTerm> interactions;
  double a = 0.0;                    // max over centres of the certified a'
  std::map<Site, double> local_a;    // per-centre a'
  double h_sup = 0.0;                // max ‖h_x‖
  double v_sup = 0.0;                // max ‖v_x‖
  bool nonpositive = false;          // every v_x <= 0 within 1e-12

  std::size_t ball_size() const;  // |B_R| in Z^D
  Region interaction_centers() const;
};

constexpr double kKernelTolerance = 1e-12;

bool gap_check(const OnSiteTerm& h);

FormBound certify_form_bound(const InteractionTerm& v, const HamiltonianSpec& spec);

/// Validates every term, certifies the form bound and fills the metadata. With `claimed_a`, fails
/// if any a'_x exceeds it; otherwise fails if a'_x >= 1.
HamiltonianSpec make_spec(LatticeGeometry geometry, int q, std::vector<OnSiteTerm> onsite,
                          std::vector<InteractionTerm> interactions,
                          std::optional<double> claimed_a = std::nullopt);

/// Σ_{x∈sites} h_x embedded in `target`.
ComplexMatrix onsite_sum(const HamiltonianSpec& spec, const Region& sites, const Region& target);
/// Σ_{x∈centers} v_x embedded in `target`. Every centre must be an interaction centre.
ComplexMatrix interaction_sum(const HamiltonianSpec& spec, const Region& centers, const Region& target);
/// Interaction centres x with B_R(x) ⊆ S.
Region centers_within(const HamiltonianSpec& spec, const Region& S);

struct RestrictedHamiltonian {
  GlobalOperator H0;
  GlobalOperator V;
  GlobalOperator H;
};

RestrictedHamiltonian build_restricted(const HamiltonianSpec& spec, const Region& S);

struct Coupling {
  Site x;
  Site y;
  cplx J;
};

struct XxzParams {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::vector<Coupling> J12;
  std::vector<Coupling> J3;
  int R = 1;
  std::optional<double> claimed_a;
};

/// h_x = (1 + λ ω_x) N_x with ω_x uniform on [0,1) drawn per site in canonical order, plus
/// hopping and density-density pair terms folded into centred v_x.
HamiltonianSpec xxz_spec(const Region& extent, const XxzParams& params);

/// Uniform nearest-neighbour couplings J(x,y) for every pair at distance 1, listed once per pair.
std::vector<Coupling> nearest_neighbour_couplings(const Region& extent, cplx J);

/// ω_x draws used by xxz_spec.
std::vector<double> disorder_draws(std::uint64_t seed, std::size_t n);

/// v'_x = v_x - ã H0_{B_R(x)} and h'_y = (1 + ã c_y) h_y with ã = a/|B_R| and
/// c_y = #{centres x : y ∈ B_R(x)}, so that H' = H and v'_x <= 0.
HamiltonianSpec normalize_nonpositive(const HamiltonianSpec& spec);

/// max_j of the violation of (1-a)E0_j <= E_j <= (1+a)E0_j on region S (<= 0 means it holds).
double bracket_violation(const HamiltonianSpec& spec, const Region& S);

}  // namespace gdoc
