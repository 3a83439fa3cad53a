#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <set>

#include "helpers.hpp"
#include "qrdft/quadrature.hpp"

using namespace qrdft;

TEST_CASE("angular rules integrate low-order polynomials") {
  for (int n : {26, 38, 86, 194, 302}) {
    const AngularRule& rule = angular_rule(n);
    REQUIRE(rule.points.size() == static_cast<std::size_t>(n));
    double w = 0.0, x2 = 0.0, x2y2 = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const Vec3& u = rule.points[k];
      w += rule.weights[k];
      x2 += rule.weights[k] * u[0] * u[0];
      x2y2 += rule.weights[k] * u[0] * u[0] * u[1] * u[1];
    }
    CHECK(w == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(x2 == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-12));
    CHECK(x2y2 == doctest::Approx(4.0 * std::numbers::pi / 15.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(angular_rule(27), InputError);
}

TEST_CASE("grid sizes follow the level table") {
  CHECK(build_molecular_grid(testing::he(), 1).size() == 520);
  CHECK(build_molecular_grid(testing::h2(), 3).size() == 8600);
  CHECK_THROWS_AS(grid_level(0), InputError);
  CHECK_THROWS_AS(grid_level(6), InputError);
}

TEST_CASE("Gaussian integral oracle") {
  for (int level = 1; level <= 5; ++level) {
    const Grid g = build_molecular_grid(testing::he(), level);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3& p = g.points[i];
      f[i] = std::exp(-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
    }
    CHECK(testing::rel_err(integrate(g, f), std::pow(std::numbers::pi, 1.5)) <= 1e-3);
  }
  // Off-centre Gaussian on a molecular grid exercises the Becke partition.
  const Molecule mol = testing::h2o();
  const Grid g = build_molecular_grid(mol, 3);
  std::vector<double> f(g.size());
  const Vec3 c = mol.atoms[1].position;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3& p = g.points[i];
    const double dx = p[0] - c[0], dy = p[1] - c[1], dz = p[2] - c[2];
    f[i] = std::exp(-2.0 * (dx * dx + dy * dy + dz * dz));
  }
  CHECK(testing::rel_err(integrate(g, f), std::pow(std::numbers::pi / 2.0, 1.5)) <= 1e-4);
}

TEST_CASE("Becke partition") {
  const Molecule mol = testing::h2o();
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    const std::vector<double> cell = becke_cell_weights(testing::random_point(rng, 3.0), mol);
    double s = 0.0;
    for (double c : cell) {
      CHECK(c >= 0.0);
      s += c;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  const Molecule h2 = testing::h2();
  const double zmid = 0.5 * h2.atoms[1].position[2];
  const std::vector<double> mid = becke_cell_weights({0.3, -0.2, zmid}, h2);
  CHECK(std::abs(mid[0] - 0.5) <= 1e-12);
  CHECK(std::abs(mid[1] - 0.5) <= 1e-12);

  const Molecule he = testing::he();
  const std::vector<Vec3> pts{{1, 0, 0}, {0, 2, 0}};
  const std::vector<double> w{0.25, 0.75};
  const std::vector<int> parents{0, 0};
  CHECK(becke_partition(pts, w, parents, he) == w);
}

TEST_CASE("grid weights are positive and deterministic") {
  const Grid a = build_molecular_grid(testing::h2o(), 2);
  const Grid b = build_molecular_grid(testing::h2o(), 2);
  CHECK(a.points == b.points);
  CHECK(a.weights == b.weights);
  CHECK(std::all_of(a.weights.begin(), a.weights.end(), [](double w) { return w > 0.0; }));
}

TEST_CASE("minibatch sampling") {
  const Grid g = build_molecular_grid(testing::he(), 1);
  Rng rng(42);
  const Minibatch full = sample_minibatch(g, g.size(), rng);
  CHECK(full.single_scale == 1.0);
  CHECK(full.pair_scale == 1.0);
  CHECK(std::set<std::size_t>(full.indices.begin(), full.indices.end()).size() == g.size());

  const Minibatch b = make_minibatch({0, 1, 2}, 8);
  CHECK(b.single_scale == doctest::Approx(8.0 / 3.0));
  CHECK(b.pair_scale == doctest::Approx(56.0 / 6.0));

  Rng r1(9), r2(9);
  const Minibatch s1 = sample_minibatch(g, 64, r1), s2 = sample_minibatch(g, 64, r2);
  CHECK(s1.indices == s2.indices);
  CHECK(std::set<std::size_t>(s1.indices.begin(), s1.indices.end()).size() == 64);
  CHECK_THROWS_AS(sample_minibatch(g, 1, rng), InputError);
  CHECK_THROWS_AS(sample_minibatch(g, g.size() + 1, rng), InputError);

  const std::vector<Minibatch> epoch = epoch_batches(100, 30, rng);
  CHECK(epoch.size() == 3);
  std::set<std::size_t> seen;
  for (const Minibatch& m : epoch) seen.insert(m.indices.begin(), m.indices.end());
  CHECK(seen.size() == 90);
}

TEST_CASE("pairwise summation") {
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  std::vector<double> ones(1000, 1.0);
  CHECK(pairwise_sum(ones) == 1000.0);
  const Grid g = build_molecular_grid(testing::h2(), 1);
  std::vector<double> zeros(g.size(), 0.0), unit(g.size(), 1.0);
  CHECK(integrate(g, zeros) == 0.0);
  CHECK(integrate(g, unit) == doctest::Approx(pairwise_sum(g.weights)).epsilon(1e-15));
}
