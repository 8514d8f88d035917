#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elm/types.hpp"
#include "elm/velocity.hpp"

namespace elm {

/// Overrides for the problem parameters; unset entries take the problem defaults.
struct ProblemParams {
  std::optional<double> epsilon;
  std::optional<double> lambda;
  std::optional<double> x0;
  std::optional<double> y0;
  std::optional<double> b;
  std::optional<double> final_time;
};

/// An exact-solution test problem for u_t + b.grad u - eps Laplace u = f.
struct Problem {
  std::string name;
  Box domain;
  double epsilon = 1.0;
  VelocityField velocity;
  InitialField initial;
  ScalarField exact;     // empty when no closed form is known
  ScalarField boundary;  // Dirichlet data
  ScalarField source;    // empty means f = 0
  double final_time = 1.0;
  double lambda = 0.0, x0 = 0.0, y0 = 0.0, b = 0.0;
  /// ||F(u0)|| = eps ||Laplace u0|| when known in closed form.
  std::optional<double> forcing_norm;

  int dimension() const { return domain.dimension; }
};

/// Gaussian pulse on [-1, 2] carried at speed b.
Problem peak_1d(const ProblemParams& p = {});
/// Front from step data on [0, 2], u(0) = 1, u(2) = 0.
Problem shock_1d(const ProblemParams& p = {});
/// Gaussian cone rotating under b = (y, -x) on [-1, 1]^2.
Problem cone_2d(const ProblemParams& p = {});
/// Front moving in x under b = (1, 0) on the unit square.
Problem shock1_2d(const ProblemParams& p = {});
/// Corner front moving under b = (1, 1) on the unit square.
Problem shock2_2d(const ProblemParams& p = {});
/// u = exp(-pi^2 eps t) sin(pi x) on [0, 1] with b = 0.
Problem heat_1d(const ProblemParams& p = {});

/// Lookup by name; throws ValidationError for unknown names.
Problem make_problem(const std::string& name, const ProblemParams& p = {});
std::vector<std::string> problem_names();

/// One factor of the front solution:
/// erfc((x - bt)/(2 sqrt(eps t))) + exp(bx/eps) erfc((x + bt)/(2 sqrt(eps t))).
double front_factor(double x, double t, double b, double epsilon);
/// The same expression evaluated literally; overflows for small eps.
double front_factor_naive(double x, double t, double b, double epsilon);

}  // namespace elm
