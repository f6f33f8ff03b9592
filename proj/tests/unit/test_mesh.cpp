#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "kirchpass/mesh.hpp"
#include "oracles.hpp"

using namespace kirchpass;

TEST_CASE("interval mesh geometry") {
  const auto mesh = Mesh::interval(2.0, 5);
  CHECK(mesh->dimension() == 1);
  CHECK(mesh->node_count() == 5);
  CHECK(mesh->interior_dof_count() == 3);
  CHECK(mesh->measure() == doctest::Approx(2.0).epsilon(1e-15));
  // Nodes at 0, 0.5, 1.0, 1.5, 2.0; dofs are the three interior ones.
  CHECK(mesh->node_coordinate(0)[0] == doctest::Approx(0.0));
  CHECK(mesh->node_coordinate(2)[0] == doctest::Approx(1.0));
  CHECK(mesh->dof_of_node(0) == -1);
  CHECK(mesh->dof_of_node(4) == -1);
  for (int d = 0; d < 3; ++d) {
    CHECK(mesh->dof_of_node(mesh->node_of_dof(d)) == d);
  }
  CHECK(mesh->elements().size() == 4);
}

TEST_CASE("interval mesh rejects degenerate input") {
  CHECK_THROWS_AS(Mesh::interval(0.0, 5), ConfigError);
  CHECK_THROWS_AS(Mesh::interval(-1.0, 5), ConfigError);
  CHECK_THROWS_AS(Mesh::interval(1.0, 2), ConfigError);
  CHECK_THROWS_AS(Mesh::rectangle(1.0, 0.0, 5, 5), ConfigError);
  CHECK_THROWS_AS(Mesh::rectangle(1.0, 1.0, 2, 5), ConfigError);
}

TEST_CASE("rectangle mesh geometry") {
  const auto mesh = Mesh::rectangle(1.0, 2.0, 4, 5);
  CHECK(mesh->dimension() == 2);
  CHECK(mesh->node_count() == 20);
  CHECK(mesh->interior_dof_count() == 2 * 3);
  CHECK(mesh->measure() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mesh->elements().size() == 2 * 3 * 4);
  // Triangles are positively oriented.
  for (const auto& e : mesh->elements()) {
    const auto a = mesh->node_coordinate(e[0]);
    const auto b = mesh->node_coordinate(e[1]);
    const auto c = mesh->node_coordinate(e[2]);
    const double det =
        (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    CHECK(det > 0.0);
  }
}

TEST_CASE("1d stiffness matrix entries") {
  const auto mesh = Mesh::interval(1.0, 5);  // h = 0.25
  const auto q = assemble_stiffness(mesh);
  const Eigen::MatrixXd Q(q->matrix());
  const double h = 0.25;
  for (int i = 0; i < 3; ++i) {
    CHECK(Q(i, i) == doctest::Approx(2.0 / h).epsilon(1e-14));
    if (i > 0) CHECK(Q(i, i - 1) == doctest::Approx(-1.0 / h).epsilon(1e-14));
  }
}

TEST_CASE("ground mode energy converges to pi^2/2") {
  // |d/dx sin(pi x)|^2 integrates to pi^2/2 on (0,1); the P1 interpolant
  // over-estimates it with an O(h^2) error, so refining by 2 divides the
  // error by about 4.
  const double exact = std::numbers::pi * std::numbers::pi / 2.0;
  double prev_err = 0.0;
  for (int nodes : {33, 65}) {
    const auto mesh = Mesh::interval(1.0, nodes);
    const auto q = assemble_stiffness(mesh);
    const auto u = nodal_interpolant(
        mesh, [](double x, double) { return std::sin(std::numbers::pi * x); });
    const double err = std::abs(h01_norm_sq(*q, u) - exact);
    CHECK(err < 1e-2);
    if (prev_err > 0.0) {
      CHECK(err < prev_err / 3.0);
      CHECK(err > prev_err / 5.0);
    }
    prev_err = err;
  }
}

TEST_CASE("2d ground mode energy converges to pi^2/2") {
  // |grad (sin(pi x) sin(pi y))|^2 integrates to 2 pi^2 * (1/2) * (1/2)
  // = pi^2 / 2 on the unit square.
  const double exact = std::numbers::pi * std::numbers::pi / 2.0;
  double prev_err = 0.0;
  for (int nodes : {9, 17}) {
    const auto mesh = Mesh::rectangle(1.0, 1.0, nodes, nodes);
    const auto q = assemble_stiffness(mesh);
    const auto u = nodal_interpolant(mesh, [](double x, double y) {
      return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
    });
    const double err = std::abs(h01_norm_sq(*q, u) - exact);
    CHECK(err < 0.1);
    if (prev_err > 0.0) CHECK(err < prev_err / 3.0);
    prev_err = err;
  }
}

TEST_CASE("nodal quadrature integrates constants and hats exactly") {
  SUBCASE("1d") {
    const auto mesh = Mesh::interval(1.0, 9);  // h = 0.125
    GridFunction u = GridFunction::zero(mesh);
    CHECK(integrate_composed(u, [](double) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-15));
    // A single hat function has integral h (trapezoid over two elements).
    u.values[3] = 1.0;
    CHECK(integrate_composed(u, [](double t) { return t; }) ==
          doctest::Approx(0.125).epsilon(1e-14));
  }
  SUBCASE("2d") {
    const auto mesh = Mesh::rectangle(1.0, 1.0, 3, 3);  // one interior dof
    GridFunction u = GridFunction::zero(mesh);
    CHECK(integrate_composed(u, [](double) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-15));
    // The nodal rule gives the hat the weight of its vertex: six incident
    // triangles, each contributing area/3 = h^2/6.
    u.values[0] = 1.0;
    CHECK(integrate_composed(u, [](double t) { return t; }) ==
          doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("lumped weights account for the full measure") {
  SUBCASE("1d") {
    const auto mesh = Mesh::interval(3.0, 7);  // h = 0.5
    CHECK(mesh->lumped_weights().size() == 5);
    CHECK(mesh->lumped_weights().minCoeff() == doctest::Approx(0.5));
    // Two boundary nodes hold h/2 each.
    CHECK(mesh->measure() - mesh->interior_weight_sum() ==
          doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("2d") {
    const auto mesh = Mesh::rectangle(1.0, 1.0, 9, 9);
    // 49 interior nodes with weight h^2 each, h = 1/8.
    CHECK(mesh->interior_weight_sum() ==
          doctest::Approx(49.0 / 64.0).epsilon(1e-14));
  }
}

TEST_CASE("riesz solve of a nonnegative load is nonnegative") {
  // The stiffness matrix is an M-matrix on these meshes, so Q^{-1} preserves
  // the nonnegative cone; the solver relies on this to build positive fields.
  oracle::TestRng rng(7);
  for (int dim = 1; dim <= 2; ++dim) {
    const auto mesh = dim == 1 ? Mesh::interval(1.0, 17)
                               : Mesh::rectangle(1.0, 1.0, 7, 7);
    const auto q = assemble_stiffness(mesh);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd b(mesh->interior_dof_count());
      for (int i = 0; i < b.size(); ++i) b[i] = rng.unit();
      const Eigen::VectorXd x = q->solve(b);
      CHECK(x.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("dual norm agrees with a dense inverse") {
  const auto mesh = Mesh::interval(1.0, 9);
  const auto q = assemble_stiffness(mesh);
  const Eigen::MatrixXd dense(q->matrix());
  const Eigen::MatrixXd inv = dense.inverse();
  oracle::TestRng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd g(mesh->interior_dof_count());
    for (int i = 0; i < g.size(); ++i) g[i] = rng.symmetric();
    const double direct = g.dot(inv * g);
    CHECK(q->dual_norm_sq(g) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("weak residual vanishes for a manufactured solution") {
  // With coeff = 1 and load g(u) = Q u reproduced exactly: pick u arbitrary,
  // then the residual of coeff Q u - load(g) with g evaluated nodally cannot
  // be formed directly; instead check the defining identity on a linear
  // problem: residual(u, 1, g) with g(t) = 0 equals the dual norm of Q u.
  const auto mesh = Mesh::interval(1.0, 9);
  const auto q = assemble_stiffness(mesh);
  const auto u = nodal_interpolant(
      mesh, [](double x, double) { return x * (1.0 - x); });
  const double res = weak_residual(*q, u, 1.0, [](double) { return 0.0; });
  const Eigen::VectorXd qu = q->apply(u.values);
  CHECK(res == doctest::Approx(std::sqrt(q->dual_norm_sq(qu))).epsilon(1e-13));
}

TEST_CASE("clipping clamps nodal values") {
  const auto mesh = Mesh::interval(1.0, 5);
  GridFunction u = GridFunction::zero(mesh);
  u.values << -0.5, 0.5, 2.0;
  const GridFunction c = clipped(u, 0.0, 1.0);
  CHECK(c.values[0] == 0.0);
  CHECK(c.values[1] == 0.5);
  CHECK(c.values[2] == 1.0);
  CHECK(u.values[0] == -0.5);  // input untouched
  CHECK(c.min_value() == 0.0);
  CHECK(c.max_value() == 1.0);
}

TEST_CASE("grid function validates its size") {
  const auto mesh = Mesh::interval(1.0, 5);
  CHECK_THROWS_AS(GridFunction(mesh, Eigen::VectorXd::Zero(7)), Error);
}
