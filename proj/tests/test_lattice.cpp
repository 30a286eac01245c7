#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "ips/configuration.hpp"
#include "ips/lattice.hpp"
#include "ips/rng.hpp"

using namespace ips;

TEST_CASE("spiral origin maps to zero") {
  for (int d : {1, 2}) {
    for (int L : {3, 5, 7, 8}) {
      Lattice lat(d, L);
      CHECK(lat.spiral_index_of_point(Point{}) == 0);
    }
  }
}

TEST_CASE("spiral is a bijection with nested shells") {
  for (int d : {1, 2}) {
    for (int L : {3, 5, 7}) {
      Lattice lat(d, L);
      std::set<int> ranks;
      for (int s = 0; s < lat.size(); ++s) ranks.insert(lat.spiral_index(s));
      CHECK(static_cast<int>(ranks.size()) == lat.size());
      CHECK(*ranks.begin() == 0);
      CHECK(*ranks.rbegin() == lat.size() - 1);
      // smaller shell always precedes larger shell
      for (int a = 0; a < lat.size(); ++a)
        for (int b = 0; b < lat.size(); ++b)
          if (lat.linf_radius(a) < lat.linf_radius(b))
            CHECK(lat.spiral_index(a) < lat.spiral_index(b));
      // rank -> site -> rank round trip
      for (int r = 0; r < lat.size(); ++r) CHECK(lat.spiral_index(lat.site_at_spiral(r)) == r);
    }
  }
}

TEST_CASE("d=2 distance-1 neighbors ranked 1..8") {
  Lattice lat(2, 7);
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      if (dx == 0 && dy == 0) continue;
      const int r = lat.spiral_index_of_point(make_point({dx, dy}));
      CHECK(r >= 1);
      CHECK(r <= 8);
    }
  }
}

TEST_CASE("d=2 L=5 spiral table matches golden file") {
  Lattice lat(2, 5);
  std::ifstream in(std::string(IPS_TEST_DATA_DIR) + "/spiral_d2_L5.txt");
  REQUIRE(in.good());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int x, y, rank;
    ss >> x >> y >> rank;
    CHECK(lat.spiral_index_of_point(make_point({x, y})) == rank);
    ++rows;
  }
  CHECK(rows == 25);
}

TEST_CASE("spiral rejects out-of-range coordinates") {
  Lattice lat(2, 5);
  CHECK_THROWS_AS(lat.spiral_index_of_point(make_point({3, 0})), std::invalid_argument);
  CHECK_THROWS_AS(lat.spiral_index_of_point(make_point({0, -3})), std::invalid_argument);
}

TEST_CASE("flip semantics") {
  Lattice lat(1, 8);
  Configuration zero(lat);
  Configuration one = flip(zero, 0);
  CHECK(one.at(0) == 1);
  CHECK(one.occupied_count() == 1);
  CHECK(flip(one, 0) == zero);
  // flips at distinct sites commute
  CHECK(flip(flip(zero, 2), 5) == flip(flip(zero, 5), 2));
}

TEST_CASE("swap semantics") {
  Lattice lat(1, 16);
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    Configuration sigma = Configuration::bernoulli(lat, 0.4, rng);
    const int i = static_cast<int>(rng.uniform_index(16));
    const int j = static_cast<int>(rng.uniform_index(16));
    Configuration swapped = swap_sites(sigma, i, j);
    CHECK(swapped.occupied_count() == sigma.occupied_count());
    CHECK(swap_sites(swapped, i, j) == sigma);
    if (sigma.at(i) == sigma.at(j)) CHECK(swapped == sigma);
  }
  Configuration sigma = Configuration::bernoulli(lat, 0.5, rng);
  CHECK(swap_sites(sigma, 3, 3) == sigma);
}

TEST_CASE("shift round trip") {
  Lattice lat(2, 6);
  Rng rng(11);
  Configuration sigma = Configuration::bernoulli(lat, 0.5, rng);
  const Point dx = make_point({2, -1});
  const Point back = make_point({-2, 1});
  CHECK(shift(shift(sigma, dx), back) == sigma);
}

TEST_CASE("discrepancy profile") {
  Lattice lat(1, 10);
  Configuration a(lat), b(lat);
  CHECK(discrepancy_profile(a, b).empty());
  b.flip_inplace(4);
  auto diff = discrepancy_profile(a, b);
  REQUIRE(diff.size() == 1);
  CHECK(diff[0] == 4);
  Configuration c(lat, 1);
  CHECK(discrepancy_profile(a, c).size() == 10);
}
