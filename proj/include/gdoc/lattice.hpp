#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gdoc {

/// A point of Z^D. Ordered lexicographically by coordinates.
struct Site {
  std::vector<int> coords;

  Site() = default;
  Site(std::initializer_list<int> c) : coords(c) {}
  explicit Site(std::vector<int> c) : coords(std::move(c)) {}

  std::size_t dim() const { return coords.size(); }

  auto operator<=>(const Site&) const = default;
  bool operator==(const Site&) const = default;
};

/// Finite set of sites, always sorted lexicographically and free of duplicates.
/// Tensor-product bases built over a Region follow this order.
class Region {
 public:
  Region() = default;
  Region(std::initializer_list<Site> sites);
  explicit Region(std::vector<Site> sites);

  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const std::vector<Site>& sites() const { return sites_; }
  const Site& operator[](std::size_t i) const { return sites_[i]; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  bool contains(const Site& x) const;
  std::optional<std::size_t> position(const Site& x) const;
  // other ⊆ *this
  bool includes(const Region& other) const;

  auto operator<=>(const Region&) const = default;
  bool operator==(const Region&) const = default;

 private:
  std::vector<Site> sites_;
};

Region operator|(const Region& a, const Region& b);
Region operator&(const Region& a, const Region& b);
Region operator-(const Region& a, const Region& b);

/// Dimension D, interaction range R and the finite lattice Λ.
struct LatticeGeometry {
  int D;
  int R;
  Region lambda;

  LatticeGeometry(int D, int R, Region lambda);
};

/// Sites 0..n-1 of Z.
LatticeGeometry chain_geometry(int n, int R);
/// Box [lo_k, hi_k] in every coordinate.
LatticeGeometry box_geometry(const std::vector<int>& lo, const std::vector<int>& hi, int R);

/// "(x1,...,xD)"
std::string to_string(const Site& x);

int l1_distance(const Site& x, const Site& y);

enum class BallMode { clipped, unclipped };

/// {y : d(x,y) <= r}, intersected with Λ unless BallMode::unclipped.
Region ball(const Site& x, int r, const LatticeGeometry& geometry,
            BallMode mode = BallMode::clipped);
/// Ball in Z^D, no clipping.
Region zd_ball(const Site& x, int r);

/// {x ∈ M : B_R(x) ⊆ Λ}
Region interior(const Region& M, const LatticeGeometry& geometry);
/// Λ ∩ ⋃_{x∈M} B_R(x)
Region closure(const Region& M, const LatticeGeometry& geometry);

/// B_R(x) ∩ B_R(y) ≠ ∅, i.e. d(x,y) <= 2R under the l1 metric.
bool r_connected(const Site& x, const Site& y, int R);
/// Some x ∈ a and y ∈ b are R-connected.
bool r_connected(const Region& a, const Region& b, int R);
/// The set is a cluster (chain-connected under r_connected). The empty set is not.
bool is_r_connected(const Region& S, int R);

/// Maximal R-connected components of the union of `parts`, ordered by their first site.
std::vector<Region> supercluster_decompose(std::span<const Region> parts, int R);

int set_distance(const Region& X, const Region& Y);

// ---------------------------------------------------------------------------
// Connected-set counting

/// Nonzero offsets δ with |δ|_1 <= 2R in lexicographic order; the alphabet of add-steps
/// in a CountingRun.
std::vector<Site> connectivity_offsets(int D, int R);

/// Trace of the counting algorithm on a connected S containing v1. `order` is the list Q,
/// `steps` holds 2|S|-2 entries: -1 advances the pointer, j >= 0 appends Q[i] + offsets[j].
struct CountingRun {
  std::vector<Site> order;
  std::vector<int> steps;
};

/// Throws if v1 ∉ S or S is not R-connected.
CountingRun counting_run(const Region& S, const Site& v1, int R);

/// Every R-connected S ⊆ Λ with v1 ∈ S and |S| = k, each exactly once, in generation order.
std::vector<Region> enumerate_connected_sets(const Site& v1, int k, const LatticeGeometry& geometry);
std::size_t count_connected_sets(const Site& v1, int k, const LatticeGeometry& geometry);

/// (2e(2R+1)^D)^{k-1}
double connected_set_bound(int D, int R, int k);
/// binom(2(k-1), k-1) * |offsets|^{k-1}: number of syntactically possible runs.
double counting_run_bound(int D, int R, int k);

}  // namespace gdoc
