#pragma once

#include <utility>
#include <vector>

#include "pathatlas/funcspace.hpp"
#include "pathatlas/report.hpp"
#include "pathatlas/tame.hpp"

namespace pathatlas {

/// The pointwise lift Phi(xi)(s) = phi(xi(s)) of a map over a time grid.
/// Unparametrized lifts require phi(0) = 0 so that paths with decaying
/// limits are mapped to paths with decaying limits.
struct LiftedMap {
  TameMap map;
  TimeGrid grid;
};

LiftedMap make_lifted(TameMap map, TimeGrid grid);

/// Nodewise evaluation; throws DomainViolation with the node index if some
/// xi(s_i) leaves the map domain.
GridPath lift_eval(const LiftedMap& Phi, const GridPath& xi);

/// Derivative candidate (dPhi|_xi eta)(s_i) = dphi|_{xi(s_i)} eta(s_i).
GridPath lift_d(const LiftedMap& Phi, const GridPath& xi, const GridPath& eta);

/// The weak tangent map (Phi(xi), dPhi|_xi eta); the second component is
/// meaningful in the L^2_H1 norm only.
std::pair<GridPath, GridPath> weak_tangent(const LiftedMap& Phi,
                                           const GridPath& xi,
                                           const GridPath& eta);

/// Finite-difference probe of differentiability in the triple norm:
/// residual(h) = |||Phi(xi+h eta) - Phi(xi) - h dPhi|_xi eta||| / h for
/// each h, the fitted slope of log residual vs log h, the central
/// difference consistency at the smallest h, and a differential-
/// continuity series. Passes when residuals are nonincreasing along
/// decreasing h and the fitted order reaches min_order (exactly linear
/// maps pass with all residuals at the floor).
VerificationReport c1_fd_check(const LiftedMap& Phi, const GridPath& xi,
                               const GridPath& eta,
                               const std::vector<double>& h_list,
                               double min_order = 0.9);

/// Same probe for the weak tangent map TPhi(xi,eta) in the product norm,
/// probing the direction (xi_hat, eta_hat).
VerificationReport tphi_fd_check(const LiftedMap& Phi, const GridPath& xi,
                                 const GridPath& eta, const GridPath& xi_hat,
                                 const GridPath& eta_hat,
                                 const std::vector<double>& h_list,
                                 double min_order = 0.9);

/// A time-dependent map family phi(s, .) with hand-coded s-derivative.
/// For |s| >= horizon the family must be constant in s and map 0 to 0.
struct ParamTameMap {
  ScaleHandle scale;
  std::function<ScaleVector(double, const ScaleVector&)> eval;
  std::function<ScaleVector(double, const ScaleVector&, const ScaleVector&)> d1;
  std::function<ScaleVector(double, const ScaleVector&, const ScaleVector&,
                            const ScaleVector&)> d2;
  std::function<ScaleVector(double, const ScaleVector&)> s_dot;
  std::function<bool(double, const ScaleVector&)> domain;
  double horizon = 0.0;
};

/// Wrap an s-independent map as a constant family (s_dot = 0).
ParamTameMap param_from_tame(const TameMap& map, double horizon = 1.0);

struct ParamLiftedMap {
  ParamTameMap map;
  TimeGrid grid;
};

ParamLiftedMap make_param_lifted(ParamTameMap map, TimeGrid grid);

GridPath param_lift_eval(const ParamLiftedMap& Phi, const GridPath& xi);
GridPath param_lift_d(const ParamLiftedMap& Phi, const GridPath& xi,
                      const GridPath& eta);
std::pair<GridPath, GridPath> param_weak_tangent(const ParamLiftedMap& Phi,
                                                 const GridPath& xi,
                                                 const GridPath& eta);

VerificationReport param_c1_fd_check(const ParamLiftedMap& Phi,
                                     const GridPath& xi, const GridPath& eta,
                                     const std::vector<double>& h_list,
                                     double min_order = 0.9);

VerificationReport param_tphi_fd_check(const ParamLiftedMap& Phi,
                                       const GridPath& xi, const GridPath& eta,
                                       const GridPath& xi_hat,
                                       const GridPath& eta_hat,
                                       const std::vector<double>& h_list,
                                       double min_order = 0.9);

/// Compare the discrete time derivative of the lifted path against
/// dphi_s|_{xi_s} xi_dot + ds phi_s(xi_s), both evaluated at interval
/// midpoints. Reports the worst node residual in |.|_1.
VerificationReport param_time_derivative_check(const ParamLiftedMap& Phi,
                                               const GridPath& xi, double tol);

/// Sampled check that the family is frozen outside its horizon and maps 0
/// to 0 there.
VerificationReport asymptotic_constancy_check(const ParamTameMap& map,
                                              double probe_radius, int n,
                                              std::uint64_t seed);

}  // namespace pathatlas
