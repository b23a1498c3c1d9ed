#include "pathatlas/lift.hpp"

#include <algorithm>
#include <cmath>

#include "pathatlas/errors.hpp"

namespace pathatlas {

namespace {

struct FdProbe {
  std::vector<double> residuals;       // |||F(x+h v)-F(x)-h dF v||| / h
  std::vector<double> central_errors;  // |||(F(x+hv)-F(x-hv))/2h - dF v|||
  std::vector<double> continuity;      // |||(dF|_{x+hv} - dF|_x) v|||/|||v|||
  double ref_norm = 0.0;               // norm scale of F(x), for the floor
};

/// Rounding floor of the residual-over-h quantity: the raw difference
/// cancels to eps * scale, so the quotient floor grows like 1/h.
double residual_floor(double h, double ref_norm) {
  return 1e-12 * (1.0 + ref_norm) / h;
}

/// Least-squares slope of log(r) vs log(h); 99 when every residual sits
/// at the rounding floor (exactly linear case).
double fitted_order(const std::vector<double>& h,
                    const std::vector<double>& r, double ref_norm) {
  bool all_floor = true;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i] > residual_floor(h[i], ref_norm)) all_floor = false;
  if (all_floor) return 99.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(std::max(r[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool nonincreasing_towards_small_h(const std::vector<double>& h,
                                   const std::vector<double>& r,
                                   double ref_norm) {
  // sort by decreasing h and require the residuals not to grow; entries
  // at the rounding floor carry no information and are skipped
  std::vector<std::size_t> idx(h.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return h[a] > h[b]; });
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) {
    if (r[i] <= residual_floor(h[i], ref_norm)) continue;
    if (r[i] > prev * (1.0 + 1e-9)) return false;
    prev = r[i];
  }
  return true;
}

VerificationReport probe_report(const std::string& check,
                                const std::string& anchor,
                                const std::vector<double>& h_list,
                                const FdProbe& probe, double min_order) {
  VerificationReport rep;
  rep.check = check;
  rep.anchor = anchor;
  const double order =
      fitted_order(h_list, probe.residuals, probe.ref_norm);
  const bool monotone =
      nonincreasing_towards_small_h(h_list, probe.residuals, probe.ref_norm);
  rep.passed = monotone && order >= min_order;
  rep.margin = order - min_order;
  Json series = Json::array();
  for (std::size_t i = 0; i < h_list.size(); ++i)
    series.push_back({{"h", h_list[i]},
                      {"residual", probe.residuals[i]},
                      {"central_diff_error", probe.central_errors[i]},
                      {"differential_continuity", probe.continuity[i]}});
  rep.details = {{"series", series},
                 {"fitted_order", order},
                 {"min_order", min_order},
                 {"monotone", monotone}};
  if (!rep.passed) rep.witnesses.push_back("finite-difference residuals did not contract");
  return rep;
}

}  // namespace

LiftedMap make_lifted(TameMap map, TimeGrid grid) {
  PATHATLAS_REQUIRE(map.fixes_origin,
                    "unparametrized lift requires a map fixing the origin");
  return LiftedMap{std::move(map), std::move(grid)};
}

GridPath lift_eval(const LiftedMap& Phi, const GridPath& xi) {
  PATHATLAS_REQUIRE(Phi.grid.same_as(xi.grid), "grid mismatch");
  std::vector<ScaleVector> vals;
  vals.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i) {
    if (!Phi.map.domain(xi.values[i]))
      throw DomainViolation("lift_eval: path value left the map domain", i);
    vals.push_back(Phi.map.eval(xi.values[i]));
  }
  return GridPath::make(xi.grid, std::move(vals));
}

GridPath lift_d(const LiftedMap& Phi, const GridPath& xi, const GridPath& eta) {
  PATHATLAS_REQUIRE(Phi.grid.same_as(xi.grid) && Phi.grid.same_as(eta.grid),
                    "grid mismatch");
  std::vector<ScaleVector> vals;
  vals.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i) {
    if (!Phi.map.domain(xi.values[i]))
      throw DomainViolation("lift_d: path value left the map domain", i);
    vals.push_back(Phi.map.d1(xi.values[i], eta.values[i]));
  }
  return GridPath::make(xi.grid, std::move(vals));
}

std::pair<GridPath, GridPath> weak_tangent(const LiftedMap& Phi,
                                           const GridPath& xi,
                                           const GridPath& eta) {
  return {lift_eval(Phi, xi), lift_d(Phi, xi, eta)};
}

VerificationReport c1_fd_check(const LiftedMap& Phi, const GridPath& xi,
                               const GridPath& eta,
                               const std::vector<double>& h_list,
                               double min_order) {
  PATHATLAS_REQUIRE(!h_list.empty(), "h_list must be nonempty");
  const GridPath base = lift_eval(Phi, xi);
  const GridPath deriv = lift_d(Phi, xi, eta);
  const double eta_norm = path_norms(eta).triple;

  FdProbe probe;
  probe.ref_norm = path_norms(base).triple;
  for (double h : h_list) {
    const GridPath plus = lift_eval(Phi, path_axpy(xi, h, eta));
    const GridPath minus = lift_eval(Phi, path_axpy(xi, -h, eta));
    GridPath res = path_sub(path_sub(plus, base), path_scale(h, deriv));
    probe.residuals.push_back(path_norms(res).triple / h);
    GridPath cd = path_sub(path_scale(0.5 / h, path_sub(plus, minus)), deriv);
    probe.central_errors.push_back(path_norms(cd).triple /
                                   (1.0 + path_norms(deriv).triple));
    const GridPath d_near = lift_d(Phi, path_axpy(xi, h, eta), eta);
    probe.continuity.push_back(path_norms(path_sub(d_near, deriv)).triple /
                               std::max(eta_norm, 1e-300));
  }
  return probe_report("lift-c1-fd", "pointwise-lift-differentiability",
                      h_list, probe, min_order);
}

VerificationReport tphi_fd_check(const LiftedMap& Phi, const GridPath& xi,
                                 const GridPath& eta, const GridPath& xi_hat,
                                 const GridPath& eta_hat,
                                 const std::vector<double>& h_list,
                                 double min_order) {
  PATHATLAS_REQUIRE(!h_list.empty(), "h_list must be nonempty");
  const auto tphi = [&](const GridPath& a, const GridPath& b) {
    return weak_tangent(Phi, a, b);
  };
  const auto [base1, base2] = tphi(xi, eta);

  // dTPhi|_(xi,eta)(xi_hat, eta_hat), second slot nodewise
  // d2phi(xi_hat, eta) + dphi eta_hat.
  std::vector<ScaleVector> second;
  second.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i) {
    ScaleVector v = Phi.map.d2(xi.values[i], xi_hat.values[i], eta.values[i]);
    v += Phi.map.d1(xi.values[i], eta_hat.values[i]);
    second.push_back(std::move(v));
  }
  const GridPath d_first = lift_d(Phi, xi, xi_hat);
  const GridPath d_second = GridPath::make(xi.grid, std::move(second));
  const double dir_norm = product_norm(xi_hat, eta_hat);

  FdProbe probe;
  probe.ref_norm = product_norm(base1, base2);
  for (double h : h_list) {
    const auto [p1, p2] =
        tphi(path_axpy(xi, h, xi_hat), path_axpy(eta, h, eta_hat));
    const auto [m1, m2] =
        tphi(path_axpy(xi, -h, xi_hat), path_axpy(eta, -h, eta_hat));
    GridPath r1 = path_sub(path_sub(p1, base1), path_scale(h, d_first));
    GridPath r2 = path_sub(path_sub(p2, base2), path_scale(h, d_second));
    probe.residuals.push_back(product_norm(r1, r2) / h);
    GridPath c1 = path_sub(path_scale(0.5 / h, path_sub(p1, m1)), d_first);
    GridPath c2 = path_sub(path_scale(0.5 / h, path_sub(p2, m2)), d_second);
    probe.central_errors.push_back(product_norm(c1, c2) /
                                   (1.0 + product_norm(d_first, d_second)));
    probe.continuity.push_back(probe.residuals.back() /
                               std::max(dir_norm, 1e-300));
  }
  return probe_report("weak-tangent-c1-fd",
                      "weak-tangent-map-differentiability", h_list, probe,
                      min_order);
}

ParamTameMap param_from_tame(const TameMap& map, double horizon) {
  ParamTameMap out;
  out.scale = map.scale;
  out.horizon = horizon;
  out.eval = [map](double, const ScaleVector& x) { return map.eval(x); };
  out.d1 = [map](double, const ScaleVector& x, const ScaleVector& eta) {
    return map.d1(x, eta);
  };
  out.d2 = [map](double, const ScaleVector& x, const ScaleVector& xi,
                 const ScaleVector& eta) { return map.d2(x, xi, eta); };
  out.s_dot = [scale = map.scale](double, const ScaleVector&) {
    return ScaleVector::zero(scale);
  };
  out.domain = [map](double, const ScaleVector& x) { return map.domain(x); };
  return out;
}

ParamLiftedMap make_param_lifted(ParamTameMap map, TimeGrid grid) {
  PATHATLAS_REQUIRE(grid.L >= map.horizon,
                    "grid window must contain the asymptotic horizon");
  return ParamLiftedMap{std::move(map), std::move(grid)};
}

GridPath param_lift_eval(const ParamLiftedMap& Phi, const GridPath& xi) {
  PATHATLAS_REQUIRE(Phi.grid.same_as(xi.grid), "grid mismatch");
  std::vector<ScaleVector> vals;
  vals.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i) {
    const double s = xi.grid.nodes[i];
    if (!Phi.map.domain(s, xi.values[i]))
      throw DomainViolation("param lift: path value left the domain", i);
    vals.push_back(Phi.map.eval(s, xi.values[i]));
  }
  return GridPath::make(xi.grid, std::move(vals));
}

GridPath param_lift_d(const ParamLiftedMap& Phi, const GridPath& xi,
                      const GridPath& eta) {
  PATHATLAS_REQUIRE(Phi.grid.same_as(xi.grid) && Phi.grid.same_as(eta.grid),
                    "grid mismatch");
  std::vector<ScaleVector> vals;
  vals.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i) {
    const double s = xi.grid.nodes[i];
    if (!Phi.map.domain(s, xi.values[i]))
      throw DomainViolation("param lift_d: path value left the domain", i);
    vals.push_back(Phi.map.d1(s, xi.values[i], eta.values[i]));
  }
  return GridPath::make(xi.grid, std::move(vals));
}

std::pair<GridPath, GridPath> param_weak_tangent(const ParamLiftedMap& Phi,
                                                 const GridPath& xi,
                                                 const GridPath& eta) {
  return {param_lift_eval(Phi, xi), param_lift_d(Phi, xi, eta)};
}

VerificationReport param_c1_fd_check(const ParamLiftedMap& Phi,
                                     const GridPath& xi, const GridPath& eta,
                                     const std::vector<double>& h_list,
                                     double min_order) {
  PATHATLAS_REQUIRE(!h_list.empty(), "h_list must be nonempty");
  const GridPath base = param_lift_eval(Phi, xi);
  const GridPath deriv = param_lift_d(Phi, xi, eta);
  const double eta_norm = path_norms(eta).triple;

  FdProbe probe;
  probe.ref_norm = path_norms(base).triple;
  for (double h : h_list) {
    const GridPath plus = param_lift_eval(Phi, path_axpy(xi, h, eta));
    const GridPath minus = param_lift_eval(Phi, path_axpy(xi, -h, eta));
    GridPath res = path_sub(path_sub(plus, base), path_scale(h, deriv));
    probe.residuals.push_back(path_norms(res).triple / h);
    GridPath cd = path_sub(path_scale(0.5 / h, path_sub(plus, minus)), deriv);
    probe.central_errors.push_back(path_norms(cd).triple /
                                   (1.0 + path_norms(deriv).triple));
    const GridPath d_near = param_lift_d(Phi, path_axpy(xi, h, eta), eta);
    probe.continuity.push_back(path_norms(path_sub(d_near, deriv)).triple /
                               std::max(eta_norm, 1e-300));
  }
  return probe_report("param-lift-c1-fd",
                      "parametrized-lift-differentiability", h_list, probe,
                      min_order);
}

VerificationReport param_tphi_fd_check(const ParamLiftedMap& Phi,
                                       const GridPath& xi, const GridPath& eta,
                                       const GridPath& xi_hat,
                                       const GridPath& eta_hat,
                                       const std::vector<double>& h_list,
                                       double min_order) {
  PATHATLAS_REQUIRE(!h_list.empty(), "h_list must be nonempty");
  const auto [base1, base2] = param_weak_tangent(Phi, xi, eta);

  std::vector<ScaleVector> second;
  second.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i) {
    const double s = xi.grid.nodes[i];
    ScaleVector v =
        Phi.map.d2(s, xi.values[i], xi_hat.values[i], eta.values[i]);
    v += Phi.map.d1(s, xi.values[i], eta_hat.values[i]);
    second.push_back(std::move(v));
  }
  const GridPath d_first = param_lift_d(Phi, xi, xi_hat);
  const GridPath d_second = GridPath::make(xi.grid, std::move(second));
  const double dir_norm = product_norm(xi_hat, eta_hat);

  FdProbe probe;
  probe.ref_norm = product_norm(base1, base2);
  for (double h : h_list) {
    const auto [p1, p2] = param_weak_tangent(Phi, path_axpy(xi, h, xi_hat),
                                             path_axpy(eta, h, eta_hat));
    const auto [m1, m2] = param_weak_tangent(Phi, path_axpy(xi, -h, xi_hat),
                                             path_axpy(eta, -h, eta_hat));
    GridPath r1 = path_sub(path_sub(p1, base1), path_scale(h, d_first));
    GridPath r2 = path_sub(path_sub(p2, base2), path_scale(h, d_second));
    probe.residuals.push_back(product_norm(r1, r2) / h);
    GridPath c1 = path_sub(path_scale(0.5 / h, path_sub(p1, m1)), d_first);
    GridPath c2 = path_sub(path_scale(0.5 / h, path_sub(p2, m2)), d_second);
    probe.central_errors.push_back(product_norm(c1, c2) /
                                   (1.0 + product_norm(d_first, d_second)));
    probe.continuity.push_back(probe.residuals.back() /
                               std::max(dir_norm, 1e-300));
  }
  return probe_report("param-weak-tangent-c1-fd",
                      "parametrized-weak-tangent-differentiability", h_list,
                      probe, min_order);
}

VerificationReport param_time_derivative_check(const ParamLiftedMap& Phi,
                                               const GridPath& xi,
                                               double tol) {
  const GridPath out = param_lift_eval(Phi, xi);
  const double dt = xi.grid.dt;
  double worst = 0.0;
  for (int i = 0; i < xi.grid.M; ++i) {
    const double s_mid = xi.grid.nodes[i] + 0.5 * dt;
    const ScaleVector xi_mid = 0.5 * (xi.values[i] + xi.values[i + 1]);
    const ScaleVector xi_dot = (1.0 / dt) * (xi.values[i + 1] - xi.values[i]);
    ScaleVector analytic = Phi.map.d1(s_mid, xi_mid, xi_dot);
    analytic += Phi.map.s_dot(s_mid, xi_mid);
    const ScaleVector discrete =
        (1.0 / dt) * (out.values[i + 1] - out.values[i]);
    worst = std::max(worst, (discrete - analytic).norm(1));
  }
  VerificationReport rep;
  rep.check = "param-lift-time-derivative";
  rep.anchor = "parametrized-lift-chain-rule";
  rep.passed = worst <= tol;
  rep.margin = tol - worst;
  rep.details = {{"worst_residual", worst}, {"tol", tol}, {"dt", dt}};
  if (!rep.passed) rep.witnesses.push_back("time-derivative decomposition residual above tolerance");
  return rep;
}

VerificationReport asymptotic_constancy_check(const ParamTameMap& map,
                                              double probe_radius, int n,
                                              std::uint64_t seed) {
  const double T = map.horizon;
  double worst_const = 0.0, worst_origin = 0.0;
  Rng base(seed);
  const ScaleVector origin = ScaleVector::zero(map.scale);
  for (int i = 0; i < n; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    const ScaleVector y = sample_in_ball(rng, origin, probe_radius);
    for (double sign : {-1.0, 1.0}) {
      const double s1 = sign * (T + 1.0), s2 = sign * (T + 2.0);
      if (map.domain(s1, y) && map.domain(s2, y))
        worst_const = std::max(
            worst_const, (map.eval(s1, y) - map.eval(s2, y)).norm(2));
      worst_origin =
          std::max(worst_origin, map.eval(s1, origin).norm(2));
    }
  }
  VerificationReport rep;
  rep.check = "asymptotic-constancy";
  rep.anchor = "family-frozen-outside-horizon";
  rep.passed = worst_const <= 1e-12 && worst_origin <= 1e-12;
  rep.margin = 1e-12 - std::max(worst_const, worst_origin);
  rep.details = {{"horizon", T},
                 {"worst_s_dependence", worst_const},
                 {"worst_origin_image", worst_origin},
                 {"n_samples", n},
                 {"seed", seed}};
  if (!rep.passed) rep.witnesses.push_back("family not frozen outside horizon");
  return rep;
}

}  // namespace pathatlas
