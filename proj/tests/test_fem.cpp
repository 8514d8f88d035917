#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "elm/errors.hpp"
#include "elm/fem.hpp"
#include "support.hpp"

using namespace elm;
using elm::test::share;

TEST_CASE("1D mass and stiffness rows") {
  const auto mesh = elm::test::unit_interval(8);
  const double h = 1.0 / 8.0;
  const auto m = assemble_mass(*mesh);
  const auto a = assemble_stiffness(*mesh, 0.3);
  // vertex 4 is interior; vertices are ordered left to right
  CHECK(m.at(4, 3) == doctest::Approx(h / 6));
  CHECK(m.at(4, 4) == doctest::Approx(2 * h / 3));
  CHECK(m.at(4, 5) == doctest::Approx(h / 6));
  CHECK(a.at(4, 3) == doctest::Approx(-0.3 / h));
  CHECK(a.at(4, 4) == doctest::Approx(0.6 / h));
  CHECK(a.at(4, 5) == doctest::Approx(-0.3 / h));
}

TEST_CASE("mass entries sum to the domain measure") {
  for (const auto& mesh : {share(Mesh::interval(-1, 2, 7)), share(Mesh::rectangle(0, 2, 0, 3, 3, 5)),
                           share(Mesh::rectangle(0, 1, 0, 1, 2, 2).refine({0, 5}))}) {
    const auto m = assemble_mass(*mesh);
    CHECK(std::abs(m.total_sum() - mesh->total_measure()) <= 1e-12 * mesh->total_measure());
  }
}

TEST_CASE("single triangle mass matrix") {
  const auto mesh = share(Mesh(2, {{0, 0, 0}, {2, 0, 0}, {0, 3, 0}}, {Cell{0, 1, 2}}));
  const double area = 3.0;
  const auto m = assemble_mass(*mesh);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(m.at(i, j) == doctest::Approx(i == j ? area / 6 : area / 12));
}

TEST_CASE("stiffness annihilates constants") {
  const auto mesh = share(Mesh::rectangle(0, 1, 0, 1, 4, 3).refine({1, 2}));
  const auto a = assemble_stiffness(*mesh, 0.7);
  const std::vector<double> c(mesh->num_vertices(), 2.5);
  for (double v : a.multiply(c)) CHECK(std::abs(v) <= 1e-12);
  CHECK_THROWS_AS(assemble_stiffness(*mesh, 0.0), NonPositiveEpsilon);
}

TEST_CASE("potential and energy norm of w(x) = x") {
  const auto mesh = elm::test::unit_interval(5);
  const auto w = interpolate(mesh, [](const Vec& x) { return x[0]; });
  CHECK(energy_phi(w, 2.0) == doctest::Approx(1.0));
  CHECK(assemble_stiffness(*mesh, 2.0).quadratic_form(w.coefficients()) == doctest::Approx(2.0));
  CHECK(energy_norm(w, 1.0) == doctest::Approx(1.0));
  const auto c = interpolate(mesh, [](const Vec&) { return 4.0; });
  CHECK(std::abs(energy_phi(c, 1.0)) <= 1e-14);
  CHECK(energy_norm(FeFunction(mesh), 1.0) == 0.0);
}

TEST_CASE("potential matches per-element gradients") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto mesh = share(Mesh::rectangle(0, 1, 0, 1, 5, 4).refine({3, 7, 11}));
  FeFunction f(mesh);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
  const double eps = 0.37;
  double ref = 0.0;
  for (std::size_t e = 0; e < mesh->num_elements(); ++e) {
    Vec g{};
    for (int i = 0; i < 3; ++i) g = g + f[mesh->cell(e)[i]] * mesh->barycentric_gradients(e)[i];
    ref += 0.5 * eps * dot(g, g) * mesh->element_measure(e);
  }
  CHECK(elm::test::rel(energy_phi(f, eps), ref) <= 1e-12);
  const double c = -3.5;
  FeFunction cf(mesh);
  for (std::size_t i = 0; i < f.size(); ++i) cf[i] = c * f[i];
  CHECK(elm::test::rel(energy_norm(cf, eps), std::abs(c) * energy_norm(f, eps)) <= 1e-12);
}

TEST_CASE("point evaluation") {
  const auto mesh = share(Mesh::rectangle(-1, 1, -1, 1, 3, 3).refine({2}));
  const auto lin = interpolate(mesh, [](const Vec& x) { return 0.5 + 2.0 * x[0] - 3.0 * x[1]; });
  std::vector<Vec> pts{{0.1, 0.2, 0}, {-0.9, 0.95, 0}, {1, 1, 0}, {0.333, -0.777, 0}};
  const auto v = eval_at_points(lin, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(std::abs(v[i] - (0.5 + 2 * pts[i][0] - 3 * pts[i][1])) <= 1e-12);
  for (std::size_t i = 0; i < mesh->num_vertices(); ++i)
    CHECK(eval_at_points(lin, std::vector<Vec>{mesh->vertex(i)})[0] == doctest::Approx(lin[i]));
  const Cell& c = mesh->cell(4);
  const Vec g = (1.0 / 3) * (mesh->vertex(c[0]) + mesh->vertex(c[1]) + mesh->vertex(c[2]));
  FeFunction r(mesh);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::cos(double(i));
  CHECK(eval_at_points(r, std::vector<Vec>{g})[0] ==
        doctest::Approx((r[c[0]] + r[c[1]] + r[c[2]]) / 3).epsilon(1e-12));
}

TEST_CASE("coarse interpolation") {
  const auto fine = share(Mesh::interval(0, 1, 1).refine({0}));
  const auto coarse = share(Mesh::interval(0, 1, 1));
  const auto sq = interpolate(fine, [](const Vec& x) { return x[0] * x[0]; });
  const auto same = interpolate_coarse(sq, fine);
  for (std::size_t i = 0; i < 3; ++i) CHECK(same[i] == sq[i]);

  // u = a, c, b at 0, 1/2, 1: I_H u(1/2) = (a+b)/2 and e = (c - (a+b)/2) hat, ||hat||^2 = 1/3.
  const double a = 0.3, c = 2.0, b = -0.7;
  FeFunction u(fine);
  for (std::size_t i = 0; i < 3; ++i) {
    const double x = fine->vertex(i)[0];
    u[i] = x == 0 ? a : x == 1 ? b : c;
  }
  const auto ih = interpolate_coarse(u, coarse);
  const auto lifted = interpolate_coarse(ih, fine);
  for (std::size_t i = 0; i < 3; ++i)
    if (fine->vertex(i)[0] == 0.5) CHECK(lifted[i] == doctest::Approx((a + b) / 2));
  FeFunction e(fine);
  for (std::size_t i = 0; i < 3; ++i) e[i] = u[i] - lifted[i];
  const double amp = c - (a + b) / 2;
  CHECK(l2_norm(e) == doctest::Approx(std::abs(amp) / std::sqrt(3.0)).epsilon(1e-12));

  const auto m2 = share(Mesh::rectangle(0, 1, 0, 1, 2, 2));
  const auto f2 = share(m2->refine({0, 3, 6}));
  const auto lin = interpolate(f2, [](const Vec& x) { return 1 + x[0] + 2 * x[1]; });
  const auto back = interpolate_coarse(interpolate_coarse(lin, m2), f2);
  FeFunction diff(f2);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = back[i] - lin[i];
  CHECK(l2_norm(diff) <= 1e-12);
}

TEST_CASE("L2 errors") {
  const auto mesh = elm::test::unit_interval(64);
  auto g = [](const Vec& x) { return 1.0 + x[0]; };
  CHECK(l2_error(interpolate(mesh, g), g) <= 1e-12);
  CHECK(l2_error(FeFunction(share(Mesh::interval(0, 2, 3))), [](const Vec&) { return 1.0; }) ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(l2_error(FeFunction(mesh), [](const Vec& x) { return std::sin(std::numbers::pi * x[0]); }) -
                 1 / std::sqrt(2.0)) <= 1e-6);
}

TEST_CASE("function writer") {
  const auto mesh = share(Mesh::interval(0, 1, 2).refine({1}));
  auto u = interpolate(mesh, [](const Vec& x) { return 2 * x[0]; });
  std::ostringstream os;
  write_function(os, u);
  CHECK(os.str() == "0 0\n0.5 1\n0.75 1.5\n1 2\n");
  std::ostringstream vtk;
  write_function(vtk, interpolate(elm::test::unit_square(1), [](const Vec& x) { return x[0]; }), "c");
  CHECK(vtk.str().find("POINT_DATA 4\nSCALARS c double 1") != std::string::npos);
}
