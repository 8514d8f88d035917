#pragma once

#include <vector>

#include "elm/fem.hpp"
#include "elm/mesh.hpp"
#include "elm/solver.hpp"
#include "elm/velocity.hpp"

namespace elm {

struct IndicatorReport {
  double xi_n = 0.0;
  std::vector<double> eta_elements;
  double eta_n = 0.0;
  std::vector<double> zeta_patches;
  double zeta_total = 0.0;
  double source_term = 0.0;
  double bound_accumulator = 0.0;
};

/// xi = (f_h - d, d) - (phi(U) - phi(U~)) / k with d = (U - U~) / k.
double compute_xi(const FeFunction& u_new, const FeFunction& u_transported, const FeFunction& f_h,
                  double k_n, double epsilon);
double compute_xi(const Operators& ops, std::span<const double> u_new,
                  std::span<const double> u_transported, std::span<const double> f_h, double k_n);

/// Scale used to judge xi against roundoff: ||d||^2 + (phi(U) + phi(U~))/k + ||f_h|| ||d||.
double xi_scale(const Operators& ops, std::span<const double> u_new,
                std::span<const double> u_transported, std::span<const double> f_h, double k_n);

struct EtaResult {
  std::vector<double> elements;
  double total = 0.0;
};

/// eta_tau = h^2/eps ||R||^2_tau + eps sum_{interior e of tau} h_e |e| J_e^2,
/// with R = f_h - (U - U~)/k.
EtaResult compute_eta(const Mesh& mesh, const FeFunction& u_new, const FeFunction& u_transported,
                      const FeFunction& f_h, double k_n, double epsilon);

/// Signed normal-derivative jump across each interior face (lower minus upper).
std::vector<double> jump_residuals(const FeFunction& u);

struct ZetaResult {
  std::vector<CoarseningPatch> patches;
  std::vector<double> patch_values;
  std::vector<double> element_values;
  double total = 0.0;
};

/// zeta over the fine elements of e = U - I_H U, grouped by coarsening patch.
ZetaResult compute_zeta(const FeFunction& u_new, MeshPtr coarse, double k_n, double epsilon);
/// Same, with the coarse mesh obtained by merging every coarsening patch.
ZetaResult compute_zeta(const FeFunction& u_new, double k_n, double epsilon);

/// (diam/pi)/sqrt(eps) * ||f(x(t_mid), t_mid) - f_h||, x(t_mid) traced back by k/2.
double source_surrogate(const ScalarField& f, const FeFunction& f_h, const VelocityField& field,
                        double t_prev, double t_n, double epsilon);

/// Running sum ||u0 - U0||^2 + sum k^2 xi + C sum k eta + sum k source^2, C = 1.
class BoundAccumulator {
 public:
  explicit BoundAccumulator(double initial_error_squared = 0.0) : value_(initial_error_squared) {}
  double add(double k_n, double xi_n, double eta_n, double source_term);
  double value() const { return value_; }

 private:
  double value_;
};

}  // namespace elm
