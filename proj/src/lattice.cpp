#include "gdoc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <string>

#include "gdoc/error.hpp"

namespace gdoc {

namespace {

void require_same_dim(const Site& x, const Site& y) {
  if (x.dim() != y.dim()) {
    throw Error("site dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                std::to_string(y.dim()));
  }
}

// Appends every point y with |y - center|_1 <= r to `out`, in lexicographic order.
void collect_ball(const Site& center, int r, std::vector<Site>& out) {
  Site y = center;
  const std::size_t D = center.dim();
  auto rec = [&](auto&& self, std::size_t k, int budget) -> void {
    if (k == D) {
      out.push_back(y);
      return;
    }
    for (int d = -budget; d <= budget; ++d) {
      y.coords[k] = center.coords[k] + d;
      self(self, k + 1, budget - std::abs(d));
    }
    y.coords[k] = center.coords[k];
  };
  rec(rec, 0, r);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Region

Region::Region(std::initializer_list<Site> sites) : Region(std::vector<Site>(sites)) {}

Region::Region(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  for (const auto& s : sites_) {
    if (s.dim() != sites_.front().dim()) throw Error("region mixes site dimensions");
  }
}

bool Region::contains(const Site& x) const {
  return std::binary_search(sites_.begin(), sites_.end(), x);
}

std::optional<std::size_t> Region::position(const Site& x) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), x);
  if (it == sites_.end() || *it != x) return std::nullopt;
  return static_cast<std::size_t>(it - sites_.begin());
}

bool Region::includes(const Region& other) const {
  return std::includes(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end());
}

Region operator|(const Region& a, const Region& b) {
  std::vector<Site> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Region(std::move(out));
}

Region operator&(const Region& a, const Region& b) {
  std::vector<Site> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Region(std::move(out));
}

Region operator-(const Region& a, const Region& b) {
  std::vector<Site> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Region(std::move(out));
}

// ---------------------------------------------------------------------------
// Geometry

LatticeGeometry::LatticeGeometry(int D_, int R_, Region lambda_)
    : D(D_), R(R_), lambda(std::move(lambda_)) {
  if (D < 1) throw Error("dimension D must be positive");
  if (R < 1) throw Error("range R must be positive");
  for (const auto& s : lambda) {
    if (s.dim() != static_cast<std::size_t>(D)) {
      throw Error("lattice site has " + std::to_string(s.dim()) + " coordinates, expected " +
                  std::to_string(D));
    }
  }
}

LatticeGeometry chain_geometry(int n, int R) {
  if (n < 1) throw Error("chain needs at least one site");
  std::vector<Site> sites;
  for (int i = 0; i < n; ++i) sites.push_back(Site{i});
  return LatticeGeometry(1, R, Region(std::move(sites)));
}

LatticeGeometry box_geometry(const std::vector<int>& lo, const std::vector<int>& hi, int R) {
  if (lo.size() != hi.size() || lo.empty()) throw Error("box bounds must have equal positive length");
  std::vector<Site> sites;
  Site x(lo);
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == lo.size()) {
      sites.push_back(x);
      return;
    }
    for (int c = lo[k]; c <= hi[k]; ++c) {
      x.coords[k] = c;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
  return LatticeGeometry(static_cast<int>(lo.size()), R, Region(std::move(sites)));
}

std::string to_string(const Site& x) {
  std::string out = "(";
  for (std::size_t k = 0; k < x.dim(); ++k) {
    if (k) out += ",";
    out += std::to_string(x.coords[k]);
  }
  return out + ")";
}

int l1_distance(const Site& x, const Site& y) {
  require_same_dim(x, y);
  int d = 0;
  for (std::size_t k = 0; k < x.dim(); ++k) d += std::abs(x.coords[k] - y.coords[k]);
  return d;
}

Region zd_ball(const Site& x, int r) {
  if (r < 0) throw Error("ball radius must be nonnegative");
  std::vector<Site> out;
  collect_ball(x, r, out);
  return Region(std::move(out));
}

Region ball(const Site& x, int r, const LatticeGeometry& geometry, BallMode mode) {
  if (x.dim() != static_cast<std::size_t>(geometry.D)) throw Error("ball centre has wrong dimension");
  Region b = zd_ball(x, r);
  if (mode == BallMode::unclipped) return b;
  return b & geometry.lambda;
}

Region interior(const Region& M, const LatticeGeometry& geometry) {
  if (!geometry.lambda.includes(M)) throw Error("interior: region is not contained in the lattice");
  std::vector<Site> out;
  for (const auto& x : M) {
    if (geometry.lambda.includes(zd_ball(x, geometry.R))) out.push_back(x);
  }
  return Region(std::move(out));
}

Region closure(const Region& M, const LatticeGeometry& geometry) {
  if (!geometry.lambda.includes(M)) throw Error("closure: region is not contained in the lattice");
  std::vector<Site> out;
  for (const auto& x : M) collect_ball(x, geometry.R, out);
  return Region(std::move(out)) & geometry.lambda;
}

bool r_connected(const Site& x, const Site& y, int R) { return l1_distance(x, y) <= 2 * R; }

bool r_connected(const Region& a, const Region& b, int R) {
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (r_connected(x, y, R)) return true;
    }
  }
  return false;
}

bool is_r_connected(const Region& S, int R) {
  if (S.empty()) return false;
  return supercluster_decompose(std::span<const Region>(&S, 1), R).size() == 1;
}

std::vector<Region> supercluster_decompose(std::span<const Region> parts, int R) {
  Region all;
  for (const auto& p : parts) all = all | p;
  const std::size_t n = all.size();
  DisjointSets dsu(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (r_connected(all[i], all[j], R)) dsu.unite(i, j);
    }
  }
  // Roots are the smallest index of each component, so grouping by root orders components
  // by their first site.
  std::vector<std::vector<Site>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[dsu.find(i)].push_back(all[i]);
  std::vector<Region> out;
  for (auto& g : groups) {
    if (!g.empty()) out.emplace_back(std::move(g));
  }
  return out;
}

int set_distance(const Region& X, const Region& Y) {
  if (X.empty() || Y.empty()) throw Error("set_distance of an empty region");
  int best = -1;
  for (const auto& x : X) {
    for (const auto& y : Y) {
      const int d = l1_distance(x, y);
      if (best < 0 || d < best) best = d;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Counting

std::vector<Site> connectivity_offsets(int D, int R) {
  Site origin(std::vector<int>(static_cast<std::size_t>(D), 0));
  std::vector<Site> out;
  for (const auto& s : zd_ball(origin, 2 * R)) {
    if (s != origin) out.push_back(s);
  }
  return out;
}

CountingRun counting_run(const Region& S, const Site& v1, int R) {
  if (!S.contains(v1)) throw Error("counting_run: v1 is not in S");
  const auto offsets = connectivity_offsets(static_cast<int>(v1.dim()), R);
  const std::size_t k = S.size();

  CountingRun run;
  run.order.push_back(v1);
  std::set<Site> used{v1};
  std::size_t i = 0;
  // Stops once n = i = k (1-based), after exactly 2k-2 steps for a connected S.
  while (!(run.order.size() == k && i + 1 == k)) {
    if (i >= run.order.size()) throw Error("counting_run: S is not R-connected");
    const Site& qi = run.order[i];
    const Site* next = nullptr;
    for (const auto& y : S) {  // S iterates in the well-ordering, so the first hit is min M
      if (!used.contains(y) && r_connected(qi, y, R)) {
        next = &y;
        break;
      }
    }
    if (next == nullptr) {
      run.steps.push_back(-1);
      ++i;
      continue;
    }
    Site delta = *next;
    for (std::size_t c = 0; c < delta.dim(); ++c) delta.coords[c] -= qi.coords[c];
    auto it = std::lower_bound(offsets.begin(), offsets.end(), delta);
    run.steps.push_back(static_cast<int>(it - offsets.begin()));
    run.order.push_back(*next);
    used.insert(*next);
  }
  return run;
}

std::vector<Region> enumerate_connected_sets(const Site& v1, int k, const LatticeGeometry& geometry) {
  if (k < 1) throw Error("enumerate_connected_sets: k must be positive");
  if (!geometry.lambda.contains(v1)) throw Error("enumerate_connected_sets: v1 is not in the lattice");
  const int R = geometry.R;

  // Canonical growth: S is generated only from its parent S \ {last element of its own run},
  // so every set appears exactly once.
  std::vector<Region> level{Region{v1}};
  for (int size = 2; size <= k; ++size) {
    std::vector<Region> next;
    for (const auto& parent : level) {
      std::vector<Site> cand;
      for (const auto& s : parent) {
        for (const auto& y : ball(s, 2 * R, geometry)) {
          if (!parent.contains(y)) cand.push_back(y);
        }
      }
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      for (const auto& y : cand) {
        Region S = parent | Region{y};
        if (counting_run(S, v1, R).order.back() == y) next.push_back(std::move(S));
      }
    }
    level = std::move(next);
  }
  return level;
}

std::size_t count_connected_sets(const Site& v1, int k, const LatticeGeometry& geometry) {
  return enumerate_connected_sets(v1, k, geometry).size();
}

double connected_set_bound(int D, int R, int k) {
  if (k < 1) throw Error("connected_set_bound: k must be positive");
  return std::pow(2.0 * std::exp(1.0) * std::pow(2.0 * R + 1.0, D), k - 1);
}

double counting_run_bound(int D, int R, int k) {
  if (k < 1) throw Error("counting_run_bound: k must be positive");
  const int m = k - 1;
  double binom = 1.0;
  for (int j = 1; j <= m; ++j) binom = binom * (m + j) / j;
  return binom * std::pow(static_cast<double>(connectivity_offsets(D, R).size()), m);
}

}  // namespace gdoc
