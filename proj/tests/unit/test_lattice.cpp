#include <doctest.h>

#include <set>

#include "gdoc/error.hpp"
#include "gdoc/lattice.hpp"
#include "oracles.hpp"

using namespace gdoc;

TEST_SUITE("lattice") {

TEST_CASE("region set operations keep sorted unique sites") {
  const Region a{Site{3}, Site{1}, Site{1}, Site{2}};
  CHECK(a.size() == 3);
  CHECK(a[0] == Site{1});
  const Region b{Site{2}, Site{5}};
  CHECK((a | b) == Region{Site{1}, Site{2}, Site{3}, Site{5}});
  CHECK((a & b) == Region{Site{2}});
  CHECK((a - b) == Region{Site{1}, Site{3}});
  CHECK(a.includes(Region{Site{1}, Site{3}}));
  CHECK_FALSE(a.includes(b));
  CHECK(a.position(Site{3}).value() == 2);
  CHECK_THROWS_AS(Region({Site{1}, Site{1, 2}}), Error);
}

TEST_CASE("balls match a direct scan of the metric") {
  const auto geo = box_geometry({0, 0}, {4, 4}, 1);
  for (const auto& x : geo.lambda) {
    for (int r = 0; r <= 3; ++r) {
      std::vector<Site> expect;
      for (const auto& y : geo.lambda) {
        if (oracle::l1(x, y) <= r) expect.push_back(y);
      }
      CHECK(ball(x, r, geo) == Region(expect));
    }
  }
  CHECK(zd_ball(Site{0, 0}, 2).size() == 13);
  CHECK(ball(Site{0}, 1, chain_geometry(3, 1), BallMode::unclipped) == Region{Site{-1}, Site{0}, Site{1}});
}

TEST_CASE("interior and closure on a chain") {
  const auto geo = chain_geometry(6, 1);
  CHECK(interior(geo.lambda, geo) == Region{Site{1}, Site{2}, Site{3}, Site{4}});
  CHECK(closure(Region{Site{0}}, geo) == Region{Site{0}, Site{1}});
  CHECK(closure(Region{Site{2}, Site{4}}, geo) == Region{Site{1}, Site{2}, Site{3}, Site{4}, Site{5}});
  CHECK(closure(Region{}, geo).empty());
  CHECK_THROWS_AS(interior(Region{Site{9}}, geo), Error);

  const auto geo2 = chain_geometry(8, 2);
  CHECK(interior(geo2.lambda, geo2) == Region{Site{2}, Site{3}, Site{4}, Site{5}});
}

TEST_CASE("interior and closure on a square agree with ball containment") {
  const auto geo = box_geometry({0, 0}, {3, 3}, 1);
  std::vector<Site> expect;
  for (const auto& x : geo.lambda) {
    bool inside = true;
    for (const auto& y : zd_ball(x, 1)) inside = inside && geo.lambda.contains(y);
    if (inside) expect.push_back(x);
  }
  CHECK(interior(geo.lambda, geo) == Region(expect));
  CHECK(interior(geo.lambda, geo).size() == 4);
}

TEST_CASE("R-connectivity is ball intersection") {
  for (int R = 1; R <= 2; ++R) {
    for (int d = 0; d <= 6; ++d) {
      const Region bx = zd_ball(Site{0}, R);
      const Region by = zd_ball(Site{d}, R);
      CHECK(r_connected(Site{0}, Site{d}, R) == !(bx & by).empty());
    }
  }
  CHECK(is_r_connected(Region{Site{0}, Site{2}, Site{4}}, 1));
  CHECK_FALSE(is_r_connected(Region{Site{0}, Site{3}}, 1));
  CHECK_FALSE(is_r_connected(Region{}, 1));
  CHECK(set_distance(Region{Site{0}, Site{1}}, Region{Site{5}}) == 4);
}

TEST_CASE("supercluster decomposition matches a brute-force grouping") {
  const Region parts[] = {Region{Site{0}, Site{7}}, Region{Site{2}}, Region{Site{12}}, Region{Site{9}, Site{4}}};
  const auto comps = supercluster_decompose(parts, 1);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0] == Region{Site{0}, Site{2}, Site{4}});
  CHECK(comps[1] == Region{Site{7}, Site{9}});
  CHECK(comps[2] == Region{Site{12}});
  const Region parts2[] = {Region{Site{9}}, Region{Site{12}}};
  CHECK(supercluster_decompose(parts2, 1).size() == 2);
  const Region parts3[] = {Region{Site{9}}, Region{Site{12}}};
  CHECK(supercluster_decompose(parts3, 2).size() == 1);
}

TEST_CASE("connected-set enumeration equals the subset-filter count") {
  for (int D = 1; D <= 2; ++D) {
    for (int R = 1; R <= 2; ++R) {
      const int kmax = (D == 2 && R == 2) ? 3 : 4;
      const int half = 2 * R * (kmax - 1);
      const auto geo = box_geometry(std::vector<int>(D, -half), std::vector<int>(D, half), R);
      const Site v1(std::vector<int>(D, 0));
      for (int k = 1; k <= kmax; ++k) {
        const auto sets = enumerate_connected_sets(v1, k, geo);
        CAPTURE(D);
        CAPTURE(R);
        CAPTURE(k);
        CHECK(sets.size() == oracle::brute_force_count(D, R, k));
        std::set<Region> unique(sets.begin(), sets.end());
        CHECK(unique.size() == sets.size());
        for (const auto& S : sets) {
          CHECK(S.contains(v1));
          CHECK(S.size() == static_cast<std::size_t>(k));
          CHECK(oracle::connected(S.sites(), R));
        }
        CHECK(static_cast<double>(sets.size()) <= connected_set_bound(D, R, k));
        CHECK(static_cast<double>(sets.size()) <= counting_run_bound(D, R, k));
      }
    }
  }
}

TEST_CASE("small counting values") {
  const auto geo = chain_geometry(21, 1);
  CHECK(count_connected_sets(Site{10}, 1, geo) == 1);
  CHECK(count_connected_sets(Site{10}, 2, geo) == 4);
  CHECK(connected_set_bound(1, 1, 1) == doctest::Approx(1.0));
  CHECK(connected_set_bound(1, 1, 2) == doctest::Approx(2.0 * std::exp(1.0) * 3.0));
}

TEST_CASE("counting runs reproduce the set and respect the step alphabet") {
  const Region S{Site{0}, Site{2}, Site{3}, Site{5}};
  const auto run = counting_run(S, Site{0}, 1);
  CHECK(Region(run.order) == S);
  CHECK(run.steps.size() == 2 * S.size() - 2);
  const auto offsets = connectivity_offsets(1, 1);
  CHECK(offsets.size() == 4);
  for (int s : run.steps) CHECK(s < static_cast<int>(offsets.size()));
  CHECK_THROWS_AS(counting_run(Region{Site{0}, Site{5}}, Site{0}, 1), Error);
  CHECK_THROWS_AS(counting_run(S, Site{1}, 1), Error);
}

}  // TEST_SUITE
