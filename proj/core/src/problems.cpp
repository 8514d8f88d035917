#include "elm/problems.hpp"

#include <cmath>
#include <numbers>

#include "elm/errors.hpp"
#include "elm/special_functions.hpp"

namespace elm {

namespace {

double get(const std::optional<double>& v, double fallback) { return v ? *v : fallback; }

Box box1(double a, double b) { return Box{1, {a, 0.0, 0.0}, {b, 0.0, 0.0}}; }
Box box2(double a, double b) { return Box{2, {a, a, 0.0}, {b, b, 0.0}}; }

void check_epsilon(double eps) {
  if (!(eps > 0.0)) throw NonPositiveEpsilon();
}

}  // namespace

double front_factor(double x, double t, double b, double eps) {
  const double s = 2.0 * std::sqrt(eps * t);
  const double z = (x + b * t) / s;
  const double first = erfc((x - b * t) / s);
  if (z < 0.0) return first + std::exp(b * x / eps) * erfc(z);
  const double y = (x - b * t) / s;
  return first + erfcx(z) * std::exp(-y * y);
}

double front_factor_naive(double x, double t, double b, double eps) {
  const double s = 2.0 * std::sqrt(eps * t);
  return std::erfc((x - b * t) / s) + std::exp(b * x / eps) * std::erfc((x + b * t) / s);
}

Problem peak_1d(const ProblemParams& p) {
  Problem pr;
  pr.name = "peak_1d";
  pr.domain = box1(-1.0, 2.0);
  pr.epsilon = get(p.epsilon, 0.01);
  pr.lambda = get(p.lambda, 0.1);
  pr.x0 = get(p.x0, 0.0);
  pr.b = get(p.b, 1.0);
  pr.final_time = get(p.final_time, 1.0);
  check_epsilon(pr.epsilon);
  if (!(pr.lambda > 0.0)) throw ValidationError("lambda", "must be positive");
  const double lam = pr.lambda, x0 = pr.x0, b = pr.b, eps = pr.epsilon;
  pr.velocity = VelocityField::constant(1, {b, 0.0, 0.0});
  pr.initial = [=](const Vec& x) {
    const double r = x[0] - x0;
    return std::exp(-r * r / (2.0 * lam * lam));
  };
  pr.exact = [=](const Vec& x, double t) {
    const double w = lam * lam + 2.0 * eps * t;
    const double r = x[0] - x0 - b * t;
    return lam / std::sqrt(w) * std::exp(-r * r / (2.0 * w));
  };
  pr.boundary = [](const Vec&, double) { return 0.0; };
  pr.forcing_norm = eps * std::sqrt(0.75 * std::sqrt(std::numbers::pi) / (lam * lam * lam));
  return pr;
}

Problem shock_1d(const ProblemParams& p) {
  Problem pr;
  pr.name = "shock_1d";
  pr.domain = box1(0.0, 2.0);
  pr.epsilon = get(p.epsilon, 1e-6);
  pr.b = get(p.b, 1.0);
  pr.final_time = get(p.final_time, 1.0);
  check_epsilon(pr.epsilon);
  const double b = pr.b, eps = pr.epsilon;
  pr.velocity = VelocityField::constant(1, {b, 0.0, 0.0});
  pr.initial = [](const Vec& x) { return x[0] <= 0.0 ? 1.0 : 0.0; };
  pr.exact = [=](const Vec& x, double t) {
    if (t <= 0.0) return x[0] <= 0.0 ? 1.0 : 0.0;
    return 0.5 * front_factor(x[0], t, b, eps);
  };
  pr.boundary = pr.exact;
  return pr;
}

Problem cone_2d(const ProblemParams& p) {
  Problem pr;
  pr.name = "cone_2d";
  pr.domain = box2(-1.0, 1.0);
  pr.epsilon = get(p.epsilon, 1e-6);
  pr.lambda = get(p.lambda, 0.125);
  pr.x0 = get(p.x0, -0.5);
  pr.y0 = get(p.y0, 0.0);
  pr.final_time = get(p.final_time, 0.5 * std::numbers::pi);
  check_epsilon(pr.epsilon);
  if (!(pr.lambda > 0.0)) throw ValidationError("lambda", "must be positive");
  const double lam = pr.lambda, x0 = pr.x0, y0 = pr.y0, eps = pr.epsilon;
  pr.velocity = VelocityField::rotation();
  pr.initial = [=](const Vec& x) {
    const double dx = x[0] - x0, dy = x[1] - y0;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * lam * lam));
  };
  pr.exact = [=](const Vec& x, double t) {
    const double c = std::cos(t), s = std::sin(t);
    const double xh = x[0] - x0 * c - y0 * s;
    const double yh = x[1] + x0 * s - y0 * c;
    const double w = lam * lam + 2.0 * eps * t;
    return lam * lam / w * std::exp(-(xh * xh + yh * yh) / (2.0 * w));
  };
  pr.boundary = pr.exact;
  pr.forcing_norm = eps * std::sqrt(2.0 * std::numbers::pi) / lam;
  return pr;
}

Problem shock1_2d(const ProblemParams& p) {
  Problem pr;
  pr.name = "shock1_2d";
  pr.domain = box2(0.0, 1.0);
  pr.epsilon = get(p.epsilon, 1e-6);
  pr.b = 1.0;
  pr.final_time = get(p.final_time, 0.5);
  check_epsilon(pr.epsilon);
  const double eps = pr.epsilon;
  pr.velocity = VelocityField::constant(2, {1.0, 0.0, 0.0});
  pr.initial = [](const Vec& x) { return x[0] < 0.2 ? 1.0 : 0.0; };
  pr.exact = [=](const Vec& x, double t) {
    if (t <= 0.0) return x[0] < 0.2 ? 1.0 : 0.0;
    return 0.5 * front_factor(x[0], t, 1.0, eps);
  };
  pr.boundary = pr.exact;
  return pr;
}

Problem shock2_2d(const ProblemParams& p) {
  Problem pr;
  pr.name = "shock2_2d";
  pr.domain = box2(0.0, 1.0);
  pr.epsilon = get(p.epsilon, 1e-6);
  pr.b = 1.0;
  pr.final_time = get(p.final_time, 0.5);
  check_epsilon(pr.epsilon);
  const double eps = pr.epsilon;
  pr.velocity = VelocityField::constant(2, {1.0, 1.0, 0.0});
  pr.initial = [](const Vec& x) { return x[0] < 0.2 && x[1] < 0.2 ? 1.0 : 0.0; };
  pr.exact = [=](const Vec& x, double t) {
    if (t <= 0.0) return x[0] < 0.2 && x[1] < 0.2 ? 1.0 : 0.0;
    return 0.25 * front_factor(x[0], t, 1.0, eps) * front_factor(x[1], t, 1.0, eps);
  };
  pr.boundary = pr.exact;
  return pr;
}

Problem heat_1d(const ProblemParams& p) {
  using std::numbers::pi;
  Problem pr;
  pr.name = "heat_1d";
  pr.domain = box1(0.0, 1.0);
  pr.epsilon = get(p.epsilon, 1.0);
  pr.final_time = get(p.final_time, 0.5);
  check_epsilon(pr.epsilon);
  const double eps = pr.epsilon;
  pr.velocity = VelocityField::zero(1);
  pr.initial = [](const Vec& x) { return std::sin(pi * x[0]); };
  pr.exact = [=](const Vec& x, double t) { return std::exp(-pi * pi * eps * t) * std::sin(pi * x[0]); };
  pr.boundary = [](const Vec&, double) { return 0.0; };
  pr.forcing_norm = eps * pi * pi / std::sqrt(2.0);
  return pr;
}

std::vector<std::string> problem_names() {
  return {"peak_1d", "shock_1d", "cone_2d", "shock1_2d", "shock2_2d", "heat_1d"};
}

Problem make_problem(const std::string& name, const ProblemParams& p) {
  if (name == "peak_1d") return peak_1d(p);
  if (name == "shock_1d") return shock_1d(p);
  if (name == "cone_2d") return cone_2d(p);
  if (name == "shock1_2d") return shock1_2d(p);
  if (name == "shock2_2d") return shock2_2d(p);
  if (name == "heat_1d") return heat_1d(p);
  throw ValidationError("benchmark", "unknown benchmark '" + name + "'");
}

}  // namespace elm
