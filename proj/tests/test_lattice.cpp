#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "fermibath/lattice.hpp"

using namespace fermibath;

TEST_CASE("geometry rejects odd or tiny sizes") {
  CHECK_THROWS_AS(LatticeGeometry::square(1), std::invalid_argument);
  CHECK_THROWS_AS(LatticeGeometry::square(3), std::invalid_argument);
  CHECK_THROWS_AS(LatticeGeometry::square(0), std::invalid_argument);
  CHECK_NOTHROW(LatticeGeometry::square(2));
}

TEST_CASE("partitions split the lattice in half") {
  for (int L : {2, 4, 6}) {
    const auto geom = LatticeGeometry::square(L);
    int left = 0;
    for (int s = 0; s < geom.num_sites(); ++s)
      if (geom.is_left(s)) ++left;
    CHECK(left == geom.num_sites() / 2);
  }
}

TEST_CASE("city-block metric is symmetric and zero only on the diagonal") {
  const auto geom = LatticeGeometry::square(4);
  for (int a = 0; a < geom.num_sites(); ++a) {
    for (int b = 0; b < geom.num_sites(); ++b) {
      CHECK(geom.city_block(a, b) == geom.city_block(b, a));
      CHECK((geom.city_block(a, b) == 0) == (a == b));
    }
  }
}

TEST_CASE("system Hamiltonian: smallest open square") {
  const auto geom = LatticeGeometry::square(2);
  const auto h = build_system_hamiltonian(geom, 1.0, 0.0);
  REQUIRE(h.dim() == 4);
  CHECK(h.matrix.diagonal().cwiseAbs().maxCoeff() == 0.0);
  int bonds = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (h.matrix(i, j) != 0.0) {
        CHECK(h.matrix(i, j) == -1.0);
        ++bonds;
      }
  CHECK(bonds == 4);
}

TEST_CASE("system Hamiltonian: J=0 leaves the diagonal") {
  const auto geom = LatticeGeometry::square(4);
  const auto h = build_system_hamiltonian(geom, 0.0, 2.5);
  CHECK((h.matrix - 2.5 * Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("bond count matches brute-force neighbour enumeration") {
  const int L = 6;
  const auto geom = LatticeGeometry::square(L);
  const auto h = build_system_hamiltonian(geom, 1.0, 5.0);
  // brute force: count unordered pairs at city-block distance 1
  int expected = 0;
  for (int a = 0; a < geom.num_sites(); ++a)
    for (int b = a + 1; b < geom.num_sites(); ++b)
      if (geom.city_block(a, b) == 1) ++expected;
  CHECK(expected == 2 * L * (L - 1));
  CHECK(expected == 60);
  int nonzero = 0;
  for (int i = 0; i < h.dim(); ++i)
    for (int j = i + 1; j < h.dim(); ++j)
      if (h.matrix(i, j) != 0.0) ++nonzero;
  CHECK(nonzero == expected);
  CHECK((h.matrix - h.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("total Hamiltonian carries the paper's coupling profile") {
  const auto geom = LatticeGeometry::square(2);
  const double gamma = 0.7, omega_max = 10.0, h_s = 5.0;
  const int M = 100;
  auto [h, layout] = build_total_hamiltonian(geom, 1.0, h_s, gamma, M, omega_max);
  REQUIRE(h.dim() == 4 * (M + 1));
  CHECK((h.matrix - h.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  // top band edge: V(omega_M) = sqrt(gamma J 0.2 / pi) at the defaults
  const double v_top = bath_coupling(gamma, omega_max, M, omega_max, h_s);
  CHECK(v_top == doctest::Approx(std::sqrt(gamma * 0.2 / std::numbers::pi))
                     .epsilon(1e-12));
  for (int n = 0; n < 4; ++n) {
    for (int m = 1; m <= M; ++m) {
      const double omega_m = m * omega_max / M;
      const int bm = layout.bath_mode(n, m);
      CHECK(h.matrix(bm, bm) == doctest::Approx(omega_m).epsilon(1e-14));
      CHECK(h.matrix(n, bm) ==
            doctest::Approx(-bath_coupling(gamma, omega_m, M, omega_max, h_s))
                .epsilon(1e-14));
    }
  }
  // no bath-bath or cross-site couplings
  for (int n = 0; n < 4; ++n)
    for (int m = 1; m <= M; ++m) {
      const int bm = layout.bath_mode(n, m);
      for (int np = 0; np < 4; ++np)
        if (np != n) CHECK(h.matrix(np, bm) == 0.0);
      CHECK(h.matrix(bm, layout.bath_mode((n + 1) % 4, m)) == 0.0);
    }
}

TEST_CASE("gamma=0 decouples the bath") {
  const auto geom = LatticeGeometry::square(2);
  auto [h, layout] = build_total_hamiltonian(geom, 1.0, 5.0, 0.0, 5, 10.0);
  CHECK(h.matrix.topRightCorner(4, h.dim() - 4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single site with two bath modes is a hand-built star") {
  // N=1 needs no lattice; assemble the expected matrix directly from the rule
  const double gamma = 0.4, omega_max = 6.0, h_s = 3.0;
  const int M = 2;
  const double w1 = omega_max / 2, w2 = omega_max;
  Eigen::MatrixXd expected(3, 3);
  expected << h_s, -bath_coupling(gamma, w1, M, omega_max, h_s),
      -bath_coupling(gamma, w2, M, omega_max, h_s),
      -bath_coupling(gamma, w1, M, omega_max, h_s), w1, 0.0,
      -bath_coupling(gamma, w2, M, omega_max, h_s), 0.0, w2;
  // same star, embedded at site 0 of a 2x2 lattice with J=0
  const auto geom = LatticeGeometry::square(2);
  auto [h, layout] = build_total_hamiltonian(geom, 0.0, h_s, gamma, M, omega_max);
  std::vector<int> star{layout.system_mode(0), layout.bath_mode(0, 1),
                        layout.bath_mode(0, 2)};
  Eigen::MatrixXd sub(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sub(i, j) = h.matrix(star[i], star[j]);
  CHECK((sub - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("total Hamiltonian rejects bad parameters") {
  const auto geom = LatticeGeometry::square(2);
  CHECK_THROWS_AS(build_total_hamiltonian(geom, 1.0, 5.0, 0.5, 0, 10.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_total_hamiltonian(geom, 1.0, 5.0, 0.5, 10, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_total_hamiltonian(geom, 1.0, 0.0, 0.5, 10, 10.0),
                  std::invalid_argument);
}

TEST_CASE("mode layout is a bijection and bath modes follow their site") {
  const auto geom = LatticeGeometry::square(4);
  const auto layout = make_mode_layout(geom, 3);
  const auto& to = layout.canonical_from_lr();
  const auto& from = layout.lr_from_canonical();
  REQUIRE(static_cast<int>(to.size()) == layout.dim());
  std::set<int> seen(to.begin(), to.end());
  CHECK(static_cast<int>(seen.size()) == layout.dim());
  for (int k = 0; k < layout.dim(); ++k) CHECK(from[to[k]] == k);
  CHECK(layout.n_left() == layout.dim() / 2);
  for (int n = 0; n < geom.num_sites(); ++n)
    for (int m = 1; m <= 3; ++m)
      CHECK(layout.mode_is_left(layout.bath_mode(n, m)) == geom.is_left(n));
}

TEST_CASE("two-site, one-bath-mode toy layout has the expected permutation") {
  const auto geom = LatticeGeometry::square(2);
  const auto layout = make_mode_layout(geom, 1);
  // canonical: sites 0,1,2,3 then bath 4,5,6,7 (one per site).
  // row-major 2x2: sites 0,2 are column 0 = left; 1,3 are column 1 = right.
  const std::vector<int> expected{0, 2, 4, 6, 1, 3, 5, 7};
  CHECK(layout.canonical_from_lr() == expected);
}

TEST_CASE("reordering is a similarity transform") {
  const auto geom = LatticeGeometry::square(2);
  const auto layout = make_mode_layout(geom, 2);
  const int d = layout.dim();
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Random(d, d);
  C = ((C + C.adjoint()) / 2).eval();

  SUBCASE("identity permutation leaves the matrix alone") {
    const auto sys_only = make_mode_layout(geom, 0);
    // 2x2 row-major: canonical order 0,2 (left), 1,3 (right)
    Eigen::MatrixXcd small = Eigen::MatrixXcd::Random(4, 4);
    const auto back =
        reorder_from_partitions(sys_only, reorder_to_partitions(sys_only, small));
    CHECK((back - small).cwiseAbs().maxCoeff() == 0.0);
  }

  const Eigen::MatrixXcd C_lr = reorder_to_partitions(layout, C);
  CHECK(std::abs(C_lr.trace() - C.trace()) < 1e-12);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e1(C, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e2(C_lr, Eigen::EigenvaluesOnly);
  CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);

  const Eigen::MatrixXcd round = reorder_from_partitions(layout, C_lr);
  CHECK((round - C).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(reorder_to_partitions(layout, Eigen::MatrixXcd::Zero(3, 3)),
                  std::invalid_argument);
}
