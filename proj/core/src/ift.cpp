#include "pathatlas/ift.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "pathatlas/errors.hpp"
#include "pathatlas/linalg.hpp"

namespace pathatlas {

namespace {

Eigen::MatrixXd jacobian(const TameMap& map, const ScaleVector& x) {
  return materialize(map.scale, [&](const ScaleVector& e) { return map.d1(x, e); });
}

struct LinearSolver {
  Eigen::FullPivLU<Eigen::MatrixXd> lu;
  bool invertible = false;

  explicit LinearSolver(const Eigen::MatrixXd& A) : lu(A) {
    invertible = lu.isInvertible();
  }
  ScaleVector solve(const ScaleHandle& scale, const ScaleVector& rhs) const {
    return from_eigen(scale, lu.solve(to_eigen(rhs)));
  }
};

}  // namespace

NearIdentityMap certify_near_identity(const TameMap& map,
                                      const ScaleVector& x0, double R,
                                      double gamma, int n,
                                      std::uint64_t seed) {
  PATHATLAS_REQUIRE(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0,1)");
  PATHATLAS_REQUIRE(R > 0.0, "radius must be positive");
  NearIdentityMap m{map, x0, R, gamma, 0.0, false};
  Rng base(seed);
  double observed = 0.0;
  for (int i = 0; i <= n; ++i) {
    // sample 0 probes the center itself
    ScaleVector y = x0;
    if (i > 0) {
      Rng rng = base.fork(static_cast<std::uint64_t>(i));
      y = sample_in_ball(rng, x0, R);
    }
    if (!map.domain(y))
      throw DomainViolation("near-identity sample left the map domain");
    Eigen::MatrixXd A = jacobian(map, y);
    A -= Eigen::MatrixXd::Identity(A.rows(), A.cols());
    observed = std::max(observed,
                        operator_norm(A, map.scale, 1, Rng::seed_mix(seed, i)));
  }
  m.observed_gamma = observed;
  m.certified = observed <= gamma;
  return m;
}

NearIdentityMap assume_near_identity(const TameMap& map,
                                     const ScaleVector& x0, double R,
                                     double gamma) {
  PATHATLAS_REQUIRE(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0,1)");
  return NearIdentityMap{map, x0, R, gamma, gamma, true};
}

InterpMap interp_make(const NearIdentityMap& base, double beta) {
  PATHATLAS_REQUIRE(beta >= 0.0 && beta <= 1.0, "beta must lie in [0,1]");
  InterpMap out;
  out.base = base;
  out.beta = beta;
  out.anchor = base.map.eval(base.center);

  const auto phi = std::make_shared<const TameMap>(base.map);
  const ScaleVector x0 = base.center;
  const ScaleVector anchor = out.anchor;
  const double R = base.radius;

  TameMap S;
  S.scale = phi->scale;
  S.fixes_origin = false;
  S.domain = [phi, x0, R](const ScaleVector& eta) {
    return eta.norm(1) < R && phi->domain(x0 + eta);
  };
  S.eval = [phi, x0, anchor, beta](const ScaleVector& eta) {
    ScaleVector v = anchor + eta;
    if (beta == 0.0) return v;
    v *= (1.0 - beta);
    axpy(beta, phi->eval(x0 + eta), v);
    return v;
  };
  S.d1 = [phi, x0, beta](const ScaleVector& eta, const ScaleVector& h) {
    if (beta == 0.0) return h;
    ScaleVector v = (1.0 - beta) * h;
    axpy(beta, phi->d1(x0 + eta, h), v);
    return v;
  };
  S.d2 = [phi, x0, beta](const ScaleVector& eta, const ScaleVector& xi,
                         const ScaleVector& h) {
    if (beta == 0.0) return ScaleVector::zero(phi->scale);
    return beta * phi->d2(x0 + eta, xi, h);
  };
  out.map = std::move(S);
  return out;
}

InvertResult newton_invert(const TameMap& map, const ScaleVector& center,
                           double radius, const ScaleVector& y, double tol,
                           int max_iter) {
  PATHATLAS_REQUIRE(tol > 0.0 && max_iter >= 1, "bad solver parameters");
  InvertResult res;
  res.x = center;
  ScaleVector r = map.eval(res.x) - y;
  res.residual = r.norm(1);
  res.residual_trace.push_back(res.residual);
  while (res.residual > tol) {
    if (res.iterations >= max_iter)
      throw SolveFailure("contraction inversion exceeded max_iter");
    res.x -= r;
    ++res.iterations;
    if ((res.x - center).norm(1) > radius)
      throw SolveFailure("contraction iterate left the certified ball");
    r = map.eval(res.x) - y;
    res.residual = r.norm(1);
    res.residual_trace.push_back(res.residual);
  }
  return res;
}

InvertResult newton_invert(const NearIdentityMap& m, const ScaleVector& y,
                           double tol, int max_iter) {
  return newton_invert(m.map, m.center, m.radius, y, tol, max_iter);
}

InvertResult newton_invert(const InterpMap& m, const ScaleVector& y,
                           double tol, int max_iter) {
  return newton_invert(m.map, ScaleVector::zero(m.map.scale), m.base.radius, y,
                       tol, max_iter);
}

VerificationReport ball_inclusions(const NearIdentityMap& m, int n_samples,
                                   std::uint64_t seed) {
  PATHATLAS_REQUIRE(m.certified, "ball_inclusions needs a certificate");
  const double R = m.radius, g = m.gamma;
  const ScaleVector anchor = m.map.eval(m.center);

  VerificationReport rep;
  rep.check = "ball-inclusions";
  rep.anchor = "contraction-inverse-ball-squeeze";
  double margin = std::numeric_limits<double>::infinity();
  int inner_pass = 0, outer_pass = 0, inj_pass = 0;
  Rng base(seed);
  for (int i = 0; i < n_samples; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    // inner inclusion: targets in the guaranteed image ball invert inside
    const ScaleVector y = sample_in_ball(rng, anchor, R * (1.0 - g) * 0.999);
    try {
      const InvertResult inv = newton_invert(m, y, 1e-12, 200);
      const double dist = (inv.x - m.center).norm(1);
      margin = std::min(margin, R - dist);
      if (dist < R)
        ++inner_pass;
      else
        rep.witnesses.push_back("inner: solution outside certified ball");
    } catch (const SolveFailure& e) {
      rep.witnesses.push_back(std::string("inner: ") + e.what());
    }
    // outer inclusion
    const ScaleVector x = sample_in_ball(rng, m.center, R);
    const double out_dist = (m.map.eval(x) - m.center).norm(1);
    margin = std::min(margin, R * (1.0 + g) + 1e-12 - out_dist);
    if (out_dist < R * (1.0 + g) + 1e-12)
      ++outer_pass;
    else
      rep.witnesses.push_back("outer: image left the enlarged ball");
    // injectivity lower bound
    const ScaleVector x2 = sample_in_ball(rng, m.center, R);
    const double sep = (m.map.eval(x) - m.map.eval(x2)).norm(1);
    const double low = (1.0 - g) * (x - x2).norm(1);
    margin = std::min(margin, sep - low + 1e-12);
    if (sep + 1e-12 >= low)
      ++inj_pass;
    else
      rep.witnesses.push_back("injectivity: contraction lower bound violated");
  }
  rep.passed = rep.witnesses.empty();
  rep.margin = margin;
  rep.details = {{"gamma", g},
                 {"R", R},
                 {"n_samples", n_samples},
                 {"seed", seed},
                 {"inner_pass", inner_pass},
                 {"outer_pass", outer_pass},
                 {"injectivity_pass", inj_pass}};
  return rep;
}

VerificationReport inverse_derivative_checks(const InterpMap& m,
                                             const ScaleVector& v, double h,
                                             std::uint64_t seed) {
  const ScaleHandle scale = m.map.scale;
  VerificationReport rep;
  rep.check = "inverse-derivative";
  rep.anchor = "neumann-inverse-bound";

  Eigen::MatrixXd A = materialize(
      scale, [&](const ScaleVector& e) { return m.map.d1(v, e); });
  LinearSolver solver(A);
  if (!solver.invertible) {
    rep.passed = false;
    rep.margin = -1.0;
    rep.witnesses.push_back(
        "certificate violation: singular linearization inside certified ball");
    return rep;
  }
  const Eigen::MatrixXd Ainv = solver.lu.inverse();
  const double measured = operator_norm(Ainv, scale, 1, seed);
  const double neumann = 1.0 / (1.0 - m.base.gamma);
  const double cap = m.base.gamma <= 0.5 ? 2.0 : neumann;
  bool pass_a = measured <= cap + 1e-9 && measured <= neumann + 1e-9;

  // closed-form second derivative of the inverse vs finite differences
  Rng rng(seed);
  const ScaleVector xi = sample_direction(rng, scale);
  const ScaleVector eta = sample_direction(rng, scale);
  const ScaleVector xi_s = solver.solve(scale, xi);
  const ScaleVector eta_s = solver.solve(scale, eta);
  const ScaleVector closed = -1.0 * solver.solve(scale, m.map.d2(v, xi_s, eta_s));

  const ScaleVector y = m.map.eval(v);
  const auto dinv_at = [&](const ScaleVector& yy) {
    const InvertResult u = newton_invert(m, yy, 1e-13, 400);
    Eigen::MatrixXd J = materialize(
        scale, [&](const ScaleVector& e) { return m.map.d1(u.x, e); });
    LinearSolver ls(J);
    if (!ls.invertible) throw SolveFailure("singular linearization in FD probe");
    return ls.solve(scale, xi);
  };
  ScaleVector yp = y, ym = y;
  axpy(h, eta, yp);
  axpy(-h, eta, ym);
  const ScaleVector fd = (1.0 / (2.0 * h)) * (dinv_at(yp) - dinv_at(ym));
  const double rel = (closed - fd).norm(2) / (1.0 + closed.norm(2));
  const bool pass_b = rel <= 1e-4;

  rep.passed = pass_a && pass_b;
  rep.margin = std::min(cap + 1e-9 - measured, 1e-4 - rel);
  rep.details = {{"gamma", m.base.gamma},
                 {"R", m.base.radius},
                 {"beta", m.beta},
                 {"inverse_op_norm", measured},
                 {"neumann_bound", neumann},
                 {"second_derivative_rel_error", rel},
                 {"fd_step", h},
                 {"seed", seed}};
  if (!pass_a) rep.witnesses.push_back("inverse operator norm exceeded the Neumann bound");
  if (!pass_b) rep.witnesses.push_back("closed-form inverse second derivative mismatch");
  return rep;
}

VerificationReport level2_inverse_estimates(const InterpMap& m, double C,
                                            int n, std::uint64_t seed) {
  PATHATLAS_REQUIRE(C > 0.0, "overlap constant must be positive");
  const ScaleHandle scale = m.map.scale;
  const double mu = 2.0 * (1.0 + 2.0 * C);
  const double K = 2.0 * std::max(mu, mu * m.anchor.norm(2));
  const double g = m.base.gamma;
  const double rv =
      std::min(m.base.radius * 0.999, 1.0 / (2.0 * mu * (1.0 + g)));

  VerificationReport rep;
  rep.check = "level2-inverse-estimates";
  rep.anchor = "interpolation-inverse-level2-bounds";
  double margin_mu = std::numeric_limits<double>::infinity();
  double margin_K = std::numeric_limits<double>::infinity();
  Rng base(seed);
  const ScaleVector origin = ScaleVector::zero(scale);
  for (int i = 0; i < n; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    const ScaleVector v = sample_in_ball(rng, origin, rv);
    const ScaleVector xi = sample_direction(rng, scale);
    Eigen::MatrixXd A = materialize(
        scale, [&](const ScaleVector& e) { return m.map.d1(v, e); });
    LinearSolver solver(A);
    if (!solver.invertible) {
      rep.witnesses.push_back("singular linearization inside sampling ball");
      continue;
    }
    const ScaleVector z = solver.solve(scale, xi);
    margin_mu = std::min(
        margin_mu, mu * (xi.norm(2) + v.norm(2) * xi.norm(1)) - z.norm(2));
    const ScaleVector Sv = m.map.eval(v);
    margin_K = std::min(margin_K, K * (Sv.norm(2) + 1.0) - v.norm(2));
  }
  rep.passed = rep.witnesses.empty() && margin_mu > 0.0 && margin_K > 0.0;
  rep.margin = std::min(margin_mu, margin_K);
  rep.details = {{"C", C},
                 {"mu", mu},
                 {"K", K},
                 {"gamma", g},
                 {"sampling_radius", rv},
                 {"margin_mu", margin_mu},
                 {"margin_K", margin_K},
                 {"n_samples", n},
                 {"seed", seed}};
  if (!rep.passed && rep.witnesses.empty())
    rep.witnesses.push_back("level-2 inverse bound violated on a sample");
  return rep;
}

namespace {
TameMap family_slice(const ParamTameMap& F, double s) {
  TameMap out;
  out.scale = F.scale;
  out.fixes_origin = false;
  out.domain = [F, s](const ScaleVector& x) { return F.domain(s, x); };
  out.eval = [F, s](const ScaleVector& x) { return F.eval(s, x); };
  out.d1 = [F, s](const ScaleVector& x, const ScaleVector& e) {
    return F.d1(s, x, e);
  };
  out.d2 = [F, s](const ScaleVector& x, const ScaleVector& a,
                  const ScaleVector& b) { return F.d2(s, x, a, b); };
  return out;
}
}  // namespace

FamilyInvertResult family_invert(const ParamTameMap& F, double s,
                                 const ScaleVector& y,
                                 const ScaleVector& center, double radius,
                                 double tol, int max_iter) {
  const TameMap slice = family_slice(F, s);
  const InvertResult inv = newton_invert(slice, center, radius, y, tol, max_iter);
  Eigen::MatrixXd A = materialize(
      F.scale, [&](const ScaleVector& e) { return F.d1(s, inv.x, e); });
  LinearSolver solver(A);
  if (!solver.invertible)
    throw SolveFailure("family slice linearization is singular");
  FamilyInvertResult out;
  out.x = inv.x;
  out.ds = -1.0 * solver.solve(F.scale, F.s_dot(s, inv.x));
  out.iterations = inv.iterations;
  out.residual = inv.residual;
  return out;
}

ScaleVector family_dy(const ParamTameMap& F, double s, const ScaleVector& x,
                      const ScaleVector& y_hat) {
  Eigen::MatrixXd A = materialize(
      F.scale, [&](const ScaleVector& e) { return F.d1(s, x, e); });
  LinearSolver solver(A);
  if (!solver.invertible)
    throw SolveFailure("family slice linearization is singular");
  return solver.solve(F.scale, y_hat);
}

VerificationReport family_inversion_checks(const ParamTameMap& F, double s,
                                           const ScaleVector& y,
                                           const ScaleVector& center,
                                           double radius, double h,
                                           std::uint64_t seed) {
  const auto G = [&](double ss, const ScaleVector& yy) {
    return family_invert(F, ss, yy, center, radius, 1e-13, 400).x;
  };
  const FamilyInvertResult base = family_invert(F, s, y, center, radius, 1e-13, 400);

  const ScaleVector fd_s = (1.0 / (2.0 * h)) * (G(s + h, y) - G(s - h, y));
  const double err_s = (base.ds - fd_s).norm(1) / (1.0 + base.ds.norm(1));

  Rng rng(seed);
  const ScaleVector y_hat = sample_direction(rng, F.scale);
  const ScaleVector an_y = family_dy(F, s, base.x, y_hat);
  ScaleVector yp = y, ym = y;
  axpy(h, y_hat, yp);
  axpy(-h, y_hat, ym);
  const ScaleVector fd_y = (1.0 / (2.0 * h)) * (G(s, yp) - G(s, ym));
  const double err_y = (an_y - fd_y).norm(1) / (1.0 + an_y.norm(1));

  VerificationReport rep;
  rep.check = "family-inverse-derivative";
  rep.anchor = "family-inverse-chain-rule";
  const double tol = 1e-5;
  rep.passed = err_s <= tol && err_y <= tol;
  rep.margin = tol - std::max(err_s, err_y);
  rep.details = {{"s", s},       {"fd_step", h},   {"err_s", err_s},
                 {"err_y", err_y}, {"tol", tol},   {"seed", seed}};
  if (!rep.passed) rep.witnesses.push_back("family inverse derivative mismatch");
  return rep;
}

TameMap invert_interp(const InterpMap& m, double tol, int max_iter) {
  const ScaleHandle scale = m.map.scale;
  const ScaleVector anchor = m.anchor;
  const double reach = m.base.radius * (1.0 - m.base.gamma);
  const auto mm = std::make_shared<const InterpMap>(m);

  TameMap out;
  out.scale = scale;
  out.fixes_origin = anchor.norm(2) == 0.0;
  out.domain = [anchor, reach](const ScaleVector& y) {
    return (y - anchor).norm(1) < reach;
  };
  out.eval = [mm, tol, max_iter](const ScaleVector& y) {
    return newton_invert(*mm, y, tol, max_iter).x;
  };
  out.d1 = [mm, scale, tol, max_iter](const ScaleVector& y,
                                      const ScaleVector& xi) {
    const ScaleVector u = newton_invert(*mm, y, tol, max_iter).x;
    Eigen::MatrixXd A = materialize(
        scale, [&](const ScaleVector& e) { return mm->map.d1(u, e); });
    LinearSolver solver(A);
    if (!solver.invertible)
      throw SolveFailure("singular linearization in interpolation inverse");
    return solver.solve(scale, xi);
  };
  out.d2 = [mm, scale, tol, max_iter](const ScaleVector& y,
                                      const ScaleVector& xi,
                                      const ScaleVector& eta) {
    const ScaleVector u = newton_invert(*mm, y, tol, max_iter).x;
    Eigen::MatrixXd A = materialize(
        scale, [&](const ScaleVector& e) { return mm->map.d1(u, e); });
    LinearSolver solver(A);
    if (!solver.invertible)
      throw SolveFailure("singular linearization in interpolation inverse");
    const ScaleVector xs = solver.solve(scale, xi);
    const ScaleVector es = solver.solve(scale, eta);
    return -1.0 * solver.solve(scale, mm->map.d2(u, xs, es));
  };
  return out;
}

}  // namespace pathatlas
