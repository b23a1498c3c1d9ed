#include "pathatlas/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pathatlas/errors.hpp"
#include "pathatlas/linalg.hpp"

namespace pathatlas {

namespace {

ScaleVector apply_matrix(const Eigen::MatrixXd& A, const ScaleVector& v) {
  return from_eigen(v.scale, A * to_eigen(v));
}

const ChartMap& chart(const PathChart& pc, int j) {  // 1-based
  return pc.cov.charts[static_cast<std::size_t>(j - 1)];
}

/// phi_j^{-1} = psi_j^{-1} o psi_{j+1} : overlap ball around u_minus -> C^j_+
TameMap junction_inverse_transition(const ChartCollection& cov, int j) {
  return compose(cov.charts[static_cast<std::size_t>(j - 1)].inv,
                 cov.charts[static_cast<std::size_t>(j)].fwd);
}

/// phi_j = psi_{j+1}^{-1} o psi_j
TameMap junction_transition(const ChartCollection& cov, int j) {
  return compose(cov.charts[static_cast<std::size_t>(j)].inv,
                 cov.charts[static_cast<std::size_t>(j - 1)].fwd);
}

}  // namespace

BasicPath make_basic_path(const TimeGrid& grid,
                          std::function<ScaleVector(double)> at, double T) {
  PATHATLAS_REQUIRE(T > 0.0 && T < grid.L, "horizon must satisfy 0 < T < L");
  BasicPath bp;
  bp.T = T;
  bp.at = at;
  bp.path = sample_path(grid, at(0.0).scale,
                        [&](double s) { return at(s).c; });
  const ScaleVector& xm = bp.path.values.front();
  const ScaleVector& xp = bp.path.values.back();
  for (int i = 0; i <= grid.M; ++i) {
    const double s = grid.nodes[i];
    if (s <= -T)
      PATHATLAS_REQUIRE((bp.path.values[i] - xm).norm(2) == 0.0,
                        "basic path must be frozen left of -T");
    if (s >= T)
      PATHATLAS_REQUIRE((bp.path.values[i] - xp).norm(2) == 0.0,
                        "basic path must be frozen right of T");
  }
  return bp;
}

void validate_covering(const ChartCollection& cov, const BasicPath& x) {
  const int k = cov.size();
  PATHATLAS_REQUIRE(k >= 1, "covering needs at least one chart");
  PATHATLAS_REQUIRE(static_cast<int>(cov.times.size()) == k - 1,
                    "covering needs k-1 junction times");
  for (int j = 1; j + 1 <= k - 1; ++j)
    PATHATLAS_REQUIRE(cov.times[j - 1] < cov.times[j],
                      "junction times must increase");
  for (double t : cov.times)
    PATHATLAS_REQUIRE(std::abs(t) < x.T, "junction times must lie in (-T,T)");

  // each leg of the path lies in the image of its chart
  const TimeGrid& grid = x.path.grid;
  for (int i = 0; i <= grid.M; ++i) {
    const double s = grid.nodes[i];
    int leg = 1;
    while (leg <= k - 1 && s > cov.times[leg - 1]) ++leg;
    const ChartMap& cm = cov.charts[static_cast<std::size_t>(leg - 1)];
    const ScaleVector u = cm.inv.eval(x.path.values[i]);
    PATHATLAS_REQUIRE(cm.boundary_margin(u) > 0.0,
                      "covering condition violated: path node left its chart");
  }
  // junction points must be distinct for consecutive junctions
  for (int j = 1; j + 1 <= k - 1; ++j) {
    const ScaleVector a = x.at(cov.times[j - 1]);
    const ScaleVector b = x.at(cov.times[j]);
    PATHATLAS_REQUIRE((a - b).norm(1) > 0.0,
                      "consecutive junction points must differ");
  }
}

Eigen::MatrixXd junction_derivative(const ChartCollection& cov,
                                    const BasicPath& x, int j) {
  PATHATLAS_REQUIRE(j >= 1 && j <= cov.size() - 1, "junction index out of range");
  const ChartMap& a = cov.charts[static_cast<std::size_t>(j - 1)];
  const ChartMap& b = cov.charts[static_cast<std::size_t>(j)];
  const ScaleVector u = a.inv.eval(x.at(cov.times[j - 1]));
  const ScaleVector pu = a.fwd.eval(u);
  return materialize(a.fwd.scale, [&](const ScaleVector& e) {
    return b.inv.d1(pu, a.fwd.d1(u, e));
  });
}

ChartMap precompose_chart(const ChartMap& c, const Eigen::MatrixXd& L) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  PATHATLAS_REQUIRE(lu.isInvertible(), "chart precomposition needs invertible L");
  const Eigen::MatrixXd Linv = lu.inverse();
  const ScaleHandle scale = c.fwd.scale;

  ChartMap out;
  out.fwd.scale = scale;
  out.fwd.fixes_origin = false;
  out.fwd.domain = [f = c.fwd, L](const ScaleVector& v) {
    return f.domain(apply_matrix(L, v));
  };
  out.fwd.eval = [f = c.fwd, L](const ScaleVector& v) {
    return f.eval(apply_matrix(L, v));
  };
  out.fwd.d1 = [f = c.fwd, L](const ScaleVector& v, const ScaleVector& e) {
    return f.d1(apply_matrix(L, v), apply_matrix(L, e));
  };
  out.fwd.d2 = [f = c.fwd, L](const ScaleVector& v, const ScaleVector& a,
                              const ScaleVector& b) {
    return f.d2(apply_matrix(L, v), apply_matrix(L, a), apply_matrix(L, b));
  };

  out.inv.scale = scale;
  out.inv.fixes_origin = false;
  out.inv.domain = c.inv.domain;
  out.inv.eval = [g = c.inv, Linv](const ScaleVector& y) {
    return apply_matrix(Linv, g.eval(y));
  };
  out.inv.d1 = [g = c.inv, Linv](const ScaleVector& y, const ScaleVector& e) {
    return apply_matrix(Linv, g.d1(y, e));
  };
  out.inv.d2 = [g = c.inv, Linv](const ScaleVector& y, const ScaleVector& a,
                                 const ScaleVector& b) {
    return apply_matrix(Linv, g.d2(y, a, b));
  };

  const double Lnorm = operator_norm(L, scale, 1);
  out.boundary_margin = [m = c.boundary_margin, L, Lnorm](const ScaleVector& v) {
    return m(apply_matrix(L, v)) / Lnorm;
  };
  return out;
}

ChartCollection normalize_covering(const ChartCollection& raw,
                                   const BasicPath& x) {
  validate_covering(raw, x);
  ChartCollection cov = raw;
  const int k = cov.size();
  for (int j = 1; j <= k - 1; ++j) {
    Eigen::MatrixXd L = junction_derivative(cov, x, j);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(L.rows(), L.cols());
    if ((L - I).norm() <= 1e-12) continue;  // already normalized
    Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
    PATHATLAS_REQUIRE(lu.isInvertible(),
                      "linearized junction transition is not invertible");
    cov.charts[static_cast<std::size_t>(j)] =
        precompose_chart(cov.charts[static_cast<std::size_t>(j)], L);
  }
  return cov;
}

namespace {

struct JunctionProbe {
  bool ok = false;
  double kappa_hat = 0.0;
  double gamma_obs = 0.0;
  double c_j = 0.0;
};

JunctionProbe probe_junction(const TameMap& phi_inv, const ScaleVector& u_minus,
                             double eps, int n, std::uint64_t seed) {
  JunctionProbe out;
  try {
    out.kappa_hat = estimate_kappa(phi_inv, u_minus, eps, n, seed);
  } catch (const DomainViolation&) {
    return out;
  }
  if (eps * out.kappa_hat >= 0.5) return out;  // shrinking step of the proof
  out.c_j = 1.25 * out.kappa_hat * std::max(1.0, u_minus.norm(2));

  const ScaleHandle scale = phi_inv.scale;
  const Eigen::MatrixXd I =
      Eigen::MatrixXd::Identity(scale->modes(), scale->modes());
  Rng base(seed + 1);
  double gamma = 0.0;
  for (int i = 0; i <= n; ++i) {
    ScaleVector q = u_minus;
    if (i > 0) {
      Rng rng = base.fork(static_cast<std::uint64_t>(i));
      q = sample_in_ball(rng, u_minus, eps);
    }
    if (!phi_inv.domain(q)) return out;
    Eigen::MatrixXd A = materialize(
        scale, [&](const ScaleVector& e) { return phi_inv.d1(q, e); });
    gamma = std::max(gamma, operator_norm(A - I, scale, 1,
                                          Rng::seed_mix(seed, 1000 + i)));
    if (gamma > 0.5) return out;
    // inequality (1): |dphi^{-1}|_q eta - eta|_2 <= 1/2 |eta|_2
    //                 + c_j (|q|_2 + 1) |eta|_1
    Rng rng2 = base.fork(static_cast<std::uint64_t>(i) + 77777);
    const ScaleVector eta = sample_direction(rng2, scale);
    const double lhs = (phi_inv.d1(q, eta) - eta).norm(2);
    const double rhs =
        0.5 * eta.norm(2) + out.c_j * (q.norm(2) + 1.0) * eta.norm(1);
    if (lhs > rhs) return out;
  }
  out.gamma_obs = gamma;
  out.ok = true;
  return out;
}

bool convexity_spot_check(const TameMap& phi_inv, const TameMap& phi_fwd,
                          const ScaleVector& u_minus, double eps, int n,
                          std::uint64_t seed) {
  Rng base(seed + 2);
  for (int i = 0; i < n; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    const ScaleVector y1 = sample_in_ball(rng, u_minus, eps);
    const ScaleVector y2 = sample_in_ball(rng, u_minus, eps);
    if (!phi_inv.domain(y1) || !phi_inv.domain(y2)) return false;
    const ScaleVector mid = 0.5 * (phi_inv.eval(y1) + phi_inv.eval(y2));
    if (!phi_fwd.domain(mid)) return false;
    if ((phi_fwd.eval(mid) - u_minus).norm(1) >= eps * (1.0 + 1e-12))
      return false;
  }
  return true;
}

}  // namespace

PathChart build_path_chart(const ChartCollection& cov, const BasicPath& x,
                           std::vector<double> t_minus,
                           const CalibrationOptions& opt) {
  validate_covering(cov, x);
  const int k = cov.size();
  PATHATLAS_REQUIRE(static_cast<int>(t_minus.size()) == k - 1,
                    "need one interpolation start per junction");
  for (int j = 1; j <= k - 1; ++j) {
    PATHATLAS_REQUIRE(t_minus[j - 1] < cov.times[j - 1],
                      "interpolation start must precede the junction time");
    PATHATLAS_REQUIRE(t_minus[j - 1] > -x.T, "interpolation must start after -T");
    if (j >= 2)
      PATHATLAS_REQUIRE(t_minus[j - 1] > cov.times[j - 2],
                        "interpolation intervals must be disjoint");
    const Eigen::MatrixXd L = junction_derivative(cov, x, j);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(L.rows(), L.cols());
    PATHATLAS_REQUIRE(operator_norm(L - I, cov.charts[0].fwd.scale, 1) <= 1e-10,
                      "covering is not normalized at a junction");
  }

  PathChart pc;
  pc.x = x;
  pc.cov = cov;
  pc.t_minus = std::move(t_minus);

  // Per-junction calibration: shrink the overlap ball until the
  // near-identity margin, the tame-ratio shrinking step, inequality (1),
  // and the convexity spot-check all pass on samples.
  for (int j = 1; j <= k - 1; ++j) {
    const TameMap phi_inv = junction_inverse_transition(cov, j);
    const TameMap phi_fwd = junction_transition(cov, j);
    const double tj = cov.times[j - 1];
    JunctionCalibration jc;
    jc.u_plus = chart(pc, j).inv.eval(x.at(tj));
    jc.u_minus = chart(pc, j + 1).inv.eval(x.at(tj));

    double eps = opt.eps0;
    bool found = false;
    for (int h = 0; h < opt.max_halvings; ++h, eps *= 0.5) {
      const JunctionProbe probe = probe_junction(
          phi_inv, jc.u_minus, eps, opt.n_samples, Rng::seed_mix(opt.seed, j));
      if (!probe.ok) continue;
      if (!convexity_spot_check(phi_inv, phi_fwd, jc.u_minus, eps,
                                opt.n_samples, Rng::seed_mix(opt.seed, 100 + j)))
        continue;
      jc.epsilon = eps;
      jc.kappa_hat = probe.kappa_hat;
      jc.c_j = probe.c_j;
      jc.gamma_observed = probe.gamma_obs;
      found = true;
      break;
    }
    PATHATLAS_REQUIRE(found, "overlap calibration failed: no admissible ball");

    // the interpolation interval must be carried into the overlap ball
    const auto inside = [&](double s) {
      return (chart(pc, j + 1).inv.eval(x.at(s)) - jc.u_minus).norm(1) <
             jc.epsilon;
    };
    PATHATLAS_REQUIRE(inside(pc.t_minus[j - 1]) && inside(tj),
                      "interpolation interval leaves the overlap ball");
    for (int i = 0; i <= x.path.grid.M; ++i) {
      const double s = x.path.grid.nodes[i];
      if (s >= pc.t_minus[j - 1] && s <= tj)
        PATHATLAS_REQUIRE(inside(s),
                          "interpolation interval leaves the overlap ball");
    }
    pc.calib.junctions.push_back(std::move(jc));
  }

  // C = max_j max_{s in [t_j^-, t_j]} c_j (1 + |psi_{j+1}^{-1}(x_s)|_2)
  double C = 0.0;
  for (int j = 1; j <= k - 1; ++j) {
    const JunctionCalibration& jc = pc.calib.junctions[j - 1];
    auto consider = [&](double s) {
      const ScaleVector u = chart(pc, j + 1).inv.eval(x.at(s));
      C = std::max(C, jc.c_j * (1.0 + u.norm(2)));
    };
    consider(pc.t_minus[j - 1]);
    consider(cov.times[j - 1]);
    for (int i = 0; i <= x.path.grid.M; ++i) {
      const double s = x.path.grid.nodes[i];
      if (s >= pc.t_minus[j - 1] && s <= cov.times[j - 1]) consider(s);
    }
  }
  pc.calib.C = C;

  // R: minimal nodewise distance-to-complement over the membership
  // conditions, times the safety factor. Interpolation legs use the
  // overlap ball (and its 2-Lipschitz preimage); plain legs use the chart
  // boundary margin.
  double R = std::numeric_limits<double>::infinity();
  const TimeGrid& grid = x.path.grid;
  auto interp_slack = [&](int j, double s) {
    const JunctionCalibration& jc = pc.calib.junctions[j - 1];
    const double d =
        jc.epsilon - (chart(pc, j + 1).inv.eval(x.at(s)) - jc.u_minus).norm(1);
    // condition on the +side preimage costs a factor 2 (phi_j is
    // 2-Lipschitz once ||dphi_j^{-1} - Id|| <= 1/2)
    return 0.5 * d;
  };
  for (int i = 0; i <= grid.M; ++i) {
    const double s = grid.nodes[i];
    bool in_interp = false;
    for (int j = 1; j <= k - 1; ++j)
      if (s >= pc.t_minus[j - 1] && s <= cov.times[j - 1]) {
        R = std::min(R, interp_slack(j, s));
        in_interp = true;
      }
    if (!in_interp) {
      int leg = 1;
      while (leg <= k - 1 && s > cov.times[leg - 1]) ++leg;
      const ChartMap& cm = chart(pc, leg);
      R = std::min(R, cm.boundary_margin(cm.inv.eval(x.path.values[i])));
    }
  }
  for (int j = 1; j <= k - 1; ++j) {
    R = std::min(R, interp_slack(j, pc.t_minus[j - 1]));
    R = std::min(R, interp_slack(j, cov.times[j - 1]));
  }
  PATHATLAS_REQUIRE(R > 0.0 && std::isfinite(R),
                    "no positive admissible radius for this covering");
  pc.R = opt.safety * R;
  return pc;
}

double chart_cutoff(const PathChart& pc, int j, double s) {
  const double a = pc.t_minus[static_cast<std::size_t>(j - 1)];
  const double b = pc.cov.times[static_cast<std::size_t>(j - 1)];
  return smoothstep((s - a) / (b - a));
}

CaseSel classify_time(const PathChart& pc, double s) {
  const int k = pc.cov.size();
  for (int j = 1; j <= k - 1; ++j)
    if (s >= pc.t_minus[j - 1] && s <= pc.cov.times[j - 1])
      return CaseSel{true, j};
  int leg = 1;
  while (leg <= k - 1 && s > pc.cov.times[leg - 1]) ++leg;
  return CaseSel{false, leg};
}

InterpMap interpolation_map(const PathChart& pc, int j, double s) {
  PATHATLAS_REQUIRE(j >= 1 && j <= pc.cov.size() - 1,
                    "interpolation junction out of range");
  const TameMap phi_inv = junction_inverse_transition(pc.cov, j);
  const ScaleVector x0 = chart(pc, j + 1).inv.eval(pc.x.at(s));
  // the 1/2 bound was calibrated on the overlap ball, which contains
  // B_R(x0) by the membership conditions
  const NearIdentityMap base = assume_near_identity(phi_inv, x0, pc.R, 0.5);
  return interp_make(base, chart_cutoff(pc, j, s));
}

GridPath chart_eval(const PathChart& pc, const GridPath& xi) {
  PATHATLAS_REQUIRE(pc.x.path.grid.same_as(xi.grid), "grid mismatch");
  std::vector<ScaleVector> vals;
  vals.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i) {
    const double s = xi.grid.nodes[i];
    const ScaleVector& v = xi.values[i];
    if (v.norm(1) >= pc.R)
      throw DomainViolation("chart_eval: |xi(s)|_1 >= R", i);
    const CaseSel sel = classify_time(pc, s);
    if (sel.interp) {
      const InterpMap S = interpolation_map(pc, sel.j, s);
      vals.push_back(chart(pc, sel.j).fwd.eval(S.map.eval(v)));
    } else {
      const ScaleVector u = chart(pc, sel.j).inv.eval(pc.x.path.values[i]);
      vals.push_back(chart(pc, sel.j).fwd.eval(u + v));
    }
  }
  return GridPath::make(xi.grid, std::move(vals));
}

namespace {

/// Point evaluation of the from-side formula at arbitrary time s.
ScaleVector chart_point_eval(const PathChart& pc, double s,
                             const ScaleVector& v, const CaseSel& sel) {
  if (sel.interp) {
    const InterpMap S = interpolation_map(pc, sel.j, s);
    return chart(pc, sel.j).fwd.eval(S.map.eval(v));
  }
  const ScaleVector u = chart(pc, sel.j).inv.eval(pc.x.at(s));
  return chart(pc, sel.j).fwd.eval(u + v);
}

/// The transition slice phi_s as a map with analytic differentials, with
/// explicitly chosen case selectors for both sides.
TameMap transition_slice(const PathChart& from, const PathChart& to, double s,
                         const CaseSel& a, const CaseSel& b,
                         double newton_tol) {
  TameMap inner;  // v -> point of the target space
  if (a.interp) {
    const InterpMap S = interpolation_map(from, a.j, s);
    inner = compose(chart(from, a.j).fwd, S.map);
  } else {
    const ScaleVector u = chart(from, a.j).inv.eval(from.x.at(s));
    inner = compose(chart(from, a.j).fwd, translation_map(u));
  }
  if (b.interp) {
    const InterpMap St = interpolation_map(to, b.j, s);
    const TameMap Stinv = invert_interp(St, newton_tol, 400);
    return compose(compose(Stinv, chart(to, b.j).inv), inner);
  }
  const ScaleVector ut = chart(to, b.j).inv.eval(to.x.at(s));
  return compose(compose(translation_map(-1.0 * ut), chart(to, b.j).inv),
                 inner);
}

}  // namespace

void write_trace_csv(std::ostream& out,
                     const std::vector<TransitionTraceRow>& trace) {
  out << "s,case,newton_iterations,residual\n";
  out.precision(17);
  for (const auto& row : trace)
    out << row.s << "," << row.case_tag << "," << row.newton_iterations << ","
        << row.residual << "\n";
}

GridPath transition_eval(const PathChart& from, const PathChart& to,
                         const GridPath& xi, double tol,
                         std::vector<TransitionTraceRow>* trace) {
  const GridPath image = chart_eval(from, xi);
  std::vector<ScaleVector> vals;
  vals.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i) {
    const double s = xi.grid.nodes[i];
    const ScaleVector& p = image.values[i];
    const CaseSel sel = classify_time(to, s);
    TransitionTraceRow row;
    row.s = s;
    row.case_tag = (classify_time(from, s).interp ? 2 : 1) +
                   (sel.interp ? 2 : 0);
    ScaleVector eta = ScaleVector::zero(xi.scale());
    if (sel.interp) {
      const InterpMap St = interpolation_map(to, sel.j, s);
      const ScaleVector w = chart(to, sel.j).inv.eval(p);
      try {
        const InvertResult inv = newton_invert(St, w, tol, 400);
        eta = inv.x;
        row.newton_iterations = inv.iterations;
        row.residual = inv.residual;
      } catch (const SolveFailure& e) {
        throw DomainViolation(
            std::string("transition_eval: interpolation inversion failed: ") +
                e.what(),
            i);
      }
    } else {
      const ScaleVector ut = chart(to, sel.j).inv.eval(to.x.path.values[i]);
      eta = chart(to, sel.j).inv.eval(p) - ut;
    }
    if (eta.norm(1) >= to.R)
      throw DomainViolation(
          "transition_eval: image leaves the target chart radius", i);
    // the computed eta must reproduce the source point
    const ScaleVector back = chart_point_eval(to, s, eta, sel);
    if ((back - p).norm(1) > 1e3 * tol)
      throw DomainViolation("transition_eval: image mismatch after solve", i);
    if (trace) trace->push_back(row);
    vals.push_back(std::move(eta));
  }
  return GridPath::make(xi.grid, std::move(vals));
}

ParamTameMap transition_param_tame(const PathChart& from, const PathChart& to,
                                   double newton_tol) {
  ParamTameMap out;
  out.scale = from.x.path.scale();
  out.horizon = std::max(from.x.T, to.x.T);
  const auto slice = [from, to, newton_tol](double s) {
    return transition_slice(from, to, s, classify_time(from, s),
                            classify_time(to, s), newton_tol);
  };
  out.eval = [slice](double s, const ScaleVector& v) {
    return slice(s).eval(v);
  };
  out.d1 = [slice](double s, const ScaleVector& v, const ScaleVector& e) {
    return slice(s).d1(v, e);
  };
  out.d2 = [slice](double s, const ScaleVector& v, const ScaleVector& a,
                   const ScaleVector& b) { return slice(s).d2(v, a, b); };
  out.s_dot = [slice](double s, const ScaleVector& v) {
    const double h = 1e-5;
    return (1.0 / (2.0 * h)) * (slice(s + h).eval(v) - slice(s - h).eval(v));
  };
  out.domain = [from, slice](double s, const ScaleVector& v) {
    return v.norm(1) < from.R && slice(s).domain(v);
  };
  return out;
}

VerificationReport junction_continuity_check(const PathChart& from,
                                             const PathChart& to, int n,
                                             std::uint64_t seed, double tol) {
  const double newton_tol = std::min(tol * 1e-2, 1e-12);
  const double rv = 0.4 * std::min(from.R, to.R);
  const ScaleVector origin = ScaleVector::zero(from.x.path.scale());

  struct Boundary {
    double s;
    CaseSel a, b;        // the interpolation-side selectors
    CaseSel a2, b2;      // the plain-side selectors
  };
  std::vector<Boundary> boundaries;
  for (int j = 1; j <= from.cov.size() - 1; ++j) {
    const double tm = from.t_minus[j - 1], tj = from.cov.times[j - 1];
    boundaries.push_back({tm, CaseSel{true, j}, classify_time(to, tm),
                          CaseSel{false, j}, classify_time(to, tm)});
    boundaries.push_back({tj, CaseSel{true, j}, classify_time(to, tj),
                          CaseSel{false, j + 1}, classify_time(to, tj)});
  }
  for (int j = 1; j <= to.cov.size() - 1; ++j) {
    const double tm = to.t_minus[j - 1], tj = to.cov.times[j - 1];
    boundaries.push_back({tm, classify_time(from, tm), CaseSel{true, j},
                          classify_time(from, tm), CaseSel{false, j}});
    boundaries.push_back({tj, classify_time(from, tj), CaseSel{true, j},
                          classify_time(from, tj), CaseSel{false, j + 1}});
  }

  VerificationReport rep;
  rep.check = "junction-continuity";
  rep.anchor = "transition-case-agreement";
  double worst = 0.0;
  Rng base(seed);
  for (const Boundary& bd : boundaries) {
    const TameMap A = transition_slice(from, to, bd.s, bd.a, bd.b, newton_tol);
    const TameMap B = transition_slice(from, to, bd.s, bd.a2, bd.b2, newton_tol);
    for (int i = 0; i < n; ++i) {
      Rng rng = base.fork(static_cast<std::uint64_t>(i));
      const ScaleVector v = sample_in_ball(rng, origin, rv);
      worst = std::max(worst, (A.eval(v) - B.eval(v)).norm(2));
    }
  }
  rep.passed = worst <= tol;
  rep.margin = tol - worst;
  rep.details = {{"worst_disagreement", worst},
                 {"tol", tol},
                 {"boundaries", boundaries.size()},
                 {"n_samples", n},
                 {"seed", seed}};
  if (!rep.passed)
    rep.witnesses.push_back("case formulas disagree at an interpolation boundary");
  return rep;
}

VerificationReport chart_checks(const PathChart& from, const PathChart& to,
                                const GridPath& xi, const GridPath& eta,
                                const ChartCheckOptions& opt) {
  const double newton_tol = std::min(opt.tol * 1e-2, 1e-12);

  // (a) roundtrip through both transitions in the triple norm
  const GridPath fwd = transition_eval(from, to, xi, newton_tol);
  const GridPath back = transition_eval(to, from, fwd, newton_tol);
  const double roundtrip = path_norms(path_sub(back, xi)).triple;
  const bool pass_a = roundtrip <= 10.0 * opt.tol;

  // (b) C^1 probe of the transition as a parametrized lift
  const ParamTameMap P = transition_param_tame(from, to, newton_tol);
  const ParamLiftedMap PL = make_param_lifted(P, xi.grid);
  VerificationReport fd = param_c1_fd_check(PL, xi, eta, opt.h_list, opt.min_order);

  // (c) weak tangent roundtrip in the product norm
  const ParamTameMap Q = transition_param_tame(to, from, newton_tol);
  const ParamLiftedMap QL = make_param_lifted(Q, xi.grid);
  const auto [mid1, mid2] = param_weak_tangent(PL, xi, eta);
  const auto [back1, back2] = param_weak_tangent(QL, mid1, mid2);
  const double trt =
      product_norm(path_sub(back1, xi), path_sub(back2, eta));
  const bool pass_c = trt <= 10.0 * opt.tol;

  VerificationReport rep;
  rep.check = "chart-transition";
  rep.anchor = "path-chart-transition-diffeomorphism";
  rep.passed = pass_a && fd.passed && pass_c;
  rep.margin = std::min({10.0 * opt.tol - roundtrip, fd.margin,
                         10.0 * opt.tol - trt});
  rep.details = {{"roundtrip_triple", roundtrip},
                 {"weak_tangent_roundtrip", trt},
                 {"tol", opt.tol},
                 {"fd", fd.details}};
  if (!pass_a) rep.witnesses.push_back("transition roundtrip above tolerance");
  if (!fd.passed) rep.witnesses.push_back("transition C1 finite-difference probe failed");
  if (!pass_c) rep.witnesses.push_back("weak tangent roundtrip above tolerance");
  return rep;
}

}  // namespace pathatlas
