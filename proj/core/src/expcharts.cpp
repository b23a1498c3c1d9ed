#include "pathatlas/expcharts.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include "pathatlas/errors.hpp"
#include "pathatlas/linalg.hpp"
#include "pathatlas/rng.hpp"

namespace pathatlas {

namespace {
constexpr double kTiny = 1e-12;
}

FinDimManifold flat_geometry(int n) {
  PATHATLAS_REQUIRE(n >= 1, "flat geometry needs n >= 1");
  FinDimManifold M;
  M.dim = n;
  M.ambient = n;
  M.exp = [](const Vec& q, const Vec& v) { return q + v; };
  M.log = [](const Vec& q, const Vec& p) { return p - q; };
  M.d_exp = [](const Vec&, const Vec&, const Vec& w) { return w; };
  M.d_log = [](const Vec&, const Vec&, const Vec& w) { return w; };
  M.inj_radius = [](const Vec&) { return 1e100; };
  M.tangent_norm = [](const Vec&, const Vec& v) { return v.norm(); };
  M.project_tangent = [](const Vec&, const Vec& v) { return v; };
  M.tangent_basis = [n](const Vec&) { return Mat::Identity(n, n); };
  M.on_manifold = [](const Vec&) { return true; };
  return M;
}

FinDimManifold sphere_geometry() {
  FinDimManifold M;
  M.dim = 2;
  M.ambient = 3;
  M.exp = [](const Vec& q, const Vec& v) -> Vec {
    const double r = v.norm();
    if (r < kTiny) return q;
    return std::cos(r) * q + (std::sin(r) / r) * v;
  };
  M.log = [](const Vec& q, const Vec& p) -> Vec {
    const double c = std::clamp(q.dot(p), -1.0, 1.0);
    PATHATLAS_REQUIRE(c > -1.0 + 1e-14, "log undefined at the antipode");
    const double theta = std::acos(c);
    if (theta < kTiny) return Vec::Zero(3);
    return (theta / std::sin(theta)) * (p - c * q);
  };
  M.d_exp = [](const Vec& q, const Vec& v, const Vec& w) -> Vec {
    const double r = v.norm();
    if (r < kTiny) return w;
    const Vec u = v / r;
    const double uw = u.dot(w);
    const double sinc = std::sin(r) / r;
    const double dsinc = (std::cos(r) - sinc) / r;
    return -std::sin(r) * uw * q + dsinc * uw * v + sinc * w;
  };
  M.d_log = [](const Vec& q, const Vec& p, const Vec& w) -> Vec {
    const double c = std::clamp(q.dot(p), -1.0, 1.0);
    const double theta = std::acos(c);
    if (theta < kTiny) return w - q.dot(w) * q;
    const double st = std::sin(theta);
    const double A = theta / st;
    const double dA = (st - theta * c) / (st * st);
    const double cp = q.dot(w);               // variation of <q,p>
    const double dtheta = -cp / st;
    return dA * dtheta * (p - c * q) + A * (w - cp * q);
  };
  M.inj_radius = [](const Vec&) { return M_PI; };
  M.tangent_norm = [](const Vec&, const Vec& v) { return v.norm(); };
  M.project_tangent = [](const Vec& q, const Vec& v) -> Vec {
    return v - q.dot(v) * q;
  };
  M.tangent_basis = [](const Vec& q) -> Mat {
    // Gram-Schmidt of the two ambient axes least aligned with q
    int skip = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(q(i)) > std::abs(q(skip))) skip = i;
    Mat B(3, 2);
    int col = 0;
    for (int i = 0; i < 3; ++i) {
      if (i == skip) continue;
      Vec e = Vec::Zero(3);
      e(i) = 1.0;
      Vec t = e - q.dot(e) * q;
      for (int c = 0; c < col; ++c) t -= B.col(c).dot(t) * B.col(c);
      B.col(col++) = t / t.norm();
    }
    return B;
  };
  M.on_manifold = [](const Vec& q) { return std::abs(q.norm() - 1.0) < 1e-9; };
  return M;
}

namespace {

using Cplx = std::complex<double>;

Cplx cval(const Vec& q) { return Cplx(q(0), q(1)); }
Vec vval(const Cplx& z) {
  Vec v(2);
  v(0) = z.real();
  v(1) = z.imag();
  return v;
}

struct ConformalF {
  double alpha;
  Cplx F(Cplx z) const { return z + alpha * std::sin(z); }
  Cplx dF(Cplx z) const { return 1.0 + alpha * std::cos(z); }
  Cplx Finv(Cplx w) const {
    Cplx z = w;
    for (int it = 0; it < 60; ++it) {
      const Cplx r = F(z) - w;
      if (std::abs(r) < 1e-15) return z;
      z -= r / dF(z);
    }
    PATHATLAS_REQUIRE(std::abs(F(z) - w) < 1e-12,
                      "conformal inverse did not converge");
    return z;
  }
};

}  // namespace

FinDimManifold conformal_flat_geometry(double alpha) {
  PATHATLAS_REQUIRE(std::abs(alpha) < 0.3, "alpha too large for the strip");
  ConformalF cf{alpha};
  FinDimManifold M;
  M.dim = 2;
  M.ambient = 2;
  M.exp = [cf](const Vec& q, const Vec& v) -> Vec {
    return vval(cf.Finv(cf.F(cval(q)) + cf.dF(cval(q)) * cval(v)));
  };
  M.log = [cf](const Vec& q, const Vec& p) -> Vec {
    return vval((cf.F(cval(p)) - cf.F(cval(q))) / cf.dF(cval(q)));
  };
  M.d_exp = [cf](const Vec& q, const Vec& v, const Vec& w) -> Vec {
    const Cplx zq = cval(q);
    const Cplx target = cf.F(zq) + cf.dF(zq) * cval(v);
    const Cplx z_exp = cf.Finv(target);
    return vval(cf.dF(zq) * cval(w) / cf.dF(z_exp));
  };
  M.d_log = [cf](const Vec& q, const Vec& p, const Vec& w) -> Vec {
    return vval(cf.dF(cval(p)) * cval(w) / cf.dF(cval(q)));
  };
  M.inj_radius = [](const Vec&) { return 1e100; };
  M.tangent_norm = [cf](const Vec& q, const Vec& v) {
    return std::abs(cf.dF(cval(q)) * cval(v));
  };
  M.project_tangent = [](const Vec&, const Vec& v) { return v; };
  M.tangent_basis = [](const Vec&) { return Mat::Identity(2, 2); };
  M.on_manifold = [](const Vec& q) { return std::abs(q(1)) <= 1.0; };
  return M;
}

ManifoldPath make_manifold_path(const FinDimManifold& M, const TimeGrid& grid,
                                std::function<Vec(double)> at, double T) {
  PATHATLAS_REQUIRE(T > 0.0 && T < grid.L, "horizon must satisfy 0 < T < L");
  ManifoldPath p;
  p.grid = grid;
  p.T = T;
  p.at = at;
  p.points.reserve(grid.M + 1);
  for (double s : grid.nodes) {
    Vec q = at(s);
    PATHATLAS_REQUIRE(q.size() == M.ambient, "ambient dimension mismatch");
    PATHATLAS_REQUIRE(M.on_manifold(q), "path left the manifold");
    p.points.push_back(std::move(q));
  }
  const Vec& qm = p.points.front();
  const Vec& qp = p.points.back();
  for (int i = 0; i <= grid.M; ++i) {
    const double s = grid.nodes[i];
    if (s <= -T)
      PATHATLAS_REQUIRE((p.points[i] - qm).norm() == 0.0,
                        "manifold path must be frozen left of -T");
    if (s >= T)
      PATHATLAS_REQUIRE((p.points[i] - qp).norm() == 0.0,
                        "manifold path must be frozen right of T");
  }
  return p;
}

Vec BasicTrivialization::to_coords(int node, const Vec& tangent) const {
  return frames[static_cast<std::size_t>(node)] * tangent;
}

Vec BasicTrivialization::to_tangent(int node, const Vec& coords) const {
  return frames[static_cast<std::size_t>(node)].transpose() * coords;
}

BasicTrivialization parallel_frames(const FinDimManifold& M,
                                    const ManifoldPath& x) {
  BasicTrivialization out;
  out.T = x.T;
  out.frames.reserve(x.points.size());
  Mat prev = M.tangent_basis(x.points.front()).transpose();  // dim x ambient
  out.frames.push_back(prev);
  for (std::size_t i = 1; i < x.points.size(); ++i) {
    const Vec& q = x.points[i];
    // transport across zero motion is the identity; this also freezes the
    // frames bit-exactly on the constant tails
    if ((q - x.points[i - 1]).norm() == 0.0) {
      out.frames.push_back(prev);
      continue;
    }
    Mat f(M.dim, M.ambient);
    for (int r = 0; r < M.dim; ++r) {
      Vec t = M.project_tangent(q, prev.row(r).transpose());
      for (int c = 0; c < r; ++c) {
        const Vec fc = f.row(c).transpose();
        t -= fc.dot(t) * fc;
      }
      PATHATLAS_REQUIRE(t.norm() > 1e-10, "frame transport degenerated");
      f.row(r) = (t / t.norm()).transpose();
    }
    out.frames.push_back(f);
    prev = f;
  }
  return out;
}

ManifoldPath exp_chart_eval(const FinDimManifold& M, const ManifoldPath& x,
                            const BasicTrivialization& Tx,
                            const GridPath& xi) {
  PATHATLAS_REQUIRE(x.grid.same_as(xi.grid), "grid mismatch");
  PATHATLAS_REQUIRE(xi.scale()->modes() == M.dim, "field dimension mismatch");
  ManifoldPath out;
  out.grid = x.grid;
  out.T = x.T;
  out.points.reserve(x.points.size());
  for (int i = 0; i < static_cast<int>(x.points.size()); ++i) {
    const Vec v = Tx.to_tangent(i, to_eigen(xi.values[i]));
    if (M.tangent_norm(x.points[i], v) >= M.inj_radius(x.points[i]))
      throw DomainViolation("exp_chart_eval: field exceeds injectivity radius",
                            i);
    out.points.push_back(M.exp(x.points[i], v));
  }
  out.at = nullptr;  // pointwise image only
  return out;
}

namespace {

Vec transition_point(const FinDimManifold& Mx, const ManifoldPath& x,
                     const BasicTrivialization& Tx, const FinDimManifold& My,
                     const ManifoldPath& y, const BasicTrivialization& Ty,
                     int node, const Vec& coords) {
  const Vec v = Tx.to_tangent(node, coords);
  if (Mx.tangent_norm(x.points[node], v) >=
      Mx.inj_radius(x.points[node]))
    throw DomainViolation("transition: field exceeds injectivity radius",
                          node);
  const Vec p = Mx.exp(x.points[node], v);
  return Ty.to_coords(node, My.log(y.points[node], p));
}

Vec transition_d1(const FinDimManifold& Mx, const ManifoldPath& x,
                  const BasicTrivialization& Tx, const FinDimManifold& My,
                  const ManifoldPath& y, const BasicTrivialization& Ty,
                  int node, const Vec& coords, const Vec& dir) {
  const Vec v = Tx.to_tangent(node, coords);
  const Vec w = Tx.to_tangent(node, dir);
  const Vec p = Mx.exp(x.points[node], v);
  const Vec dp = Mx.d_exp(x.points[node], v, w);
  return Ty.to_coords(node, My.d_log(y.points[node], p, dp));
}

}  // namespace

GridPath exp_transition(const FinDimManifold& Mx, const ManifoldPath& x,
                        const BasicTrivialization& Tx,
                        const FinDimManifold& My, const ManifoldPath& y,
                        const BasicTrivialization& Ty, const GridPath& xi) {
  PATHATLAS_REQUIRE(x.grid.same_as(xi.grid) && y.grid.same_as(xi.grid),
                    "grid mismatch");
  const ScaleHandle scale = xi.scale();
  std::vector<ScaleVector> vals;
  vals.reserve(xi.values.size());
  for (int i = 0; i < xi.nodes(); ++i)
    vals.push_back(from_eigen(
        scale, transition_point(Mx, x, Tx, My, y, Ty, i,
                                to_eigen(xi.values[i]))));
  return GridPath::make(xi.grid, std::move(vals));
}

ParamTameMap trivialized_transition(const FinDimManifold& Mx,
                                    const ManifoldPath& x,
                                    const BasicTrivialization& Tx,
                                    const FinDimManifold& My,
                                    const ManifoldPath& y,
                                    const BasicTrivialization& Ty) {
  auto scale = ScalePair::constant(Mx.dim);
  const TimeGrid grid = x.grid;
  const auto node_of = [grid](double s) {
    const long i = std::lround((s + grid.L) / grid.dt);
    return static_cast<int>(std::clamp<long>(i, 0, grid.M));
  };
  ParamTameMap out;
  out.scale = scale;
  out.horizon = std::max(x.T, y.T);
  out.eval = [=](double s, const ScaleVector& v) {
    return from_eigen(scale, transition_point(Mx, x, Tx, My, y, Ty, node_of(s),
                                              to_eigen(v)));
  };
  out.d1 = [=](double s, const ScaleVector& v, const ScaleVector& e) {
    return from_eigen(scale, transition_d1(Mx, x, Tx, My, y, Ty, node_of(s),
                                           to_eigen(v), to_eigen(e)));
  };
  out.d2 = [=](double s, const ScaleVector& v, const ScaleVector& a,
               const ScaleVector& b) {
    const double h = 1e-6;
    const int i = node_of(s);
    const Vec vp = to_eigen(v) + h * to_eigen(a);
    const Vec vm = to_eigen(v) - h * to_eigen(a);
    const Vec d = (transition_d1(Mx, x, Tx, My, y, Ty, i, vp, to_eigen(b)) -
                   transition_d1(Mx, x, Tx, My, y, Ty, i, vm, to_eigen(b))) /
                  (2.0 * h);
    return from_eigen(scale, d);
  };
  out.s_dot = [=](double s, const ScaleVector& v) {
    const int i = node_of(s);
    const int ip = std::min(i + 1, grid.M), im = std::max(i - 1, 0);
    const Vec d =
        (transition_point(Mx, x, Tx, My, y, Ty, ip, to_eigen(v)) -
         transition_point(Mx, x, Tx, My, y, Ty, im, to_eigen(v))) /
        ((ip - im) * grid.dt);
    return from_eigen(scale, d);
  };
  out.domain = [=](double s, const ScaleVector& v) {
    const int i = node_of(s);
    const Vec t = Tx.to_tangent(i, to_eigen(v));
    return Mx.tangent_norm(x.points[i], t) < Mx.inj_radius(x.points[i]);
  };
  return out;
}

VerificationReport model_hypotheses_check(
    const FinDimManifold& Mx, const ManifoldPath& x,
    const BasicTrivialization& Tx, const FinDimManifold& My,
    const ManifoldPath& y, const BasicTrivialization& Ty,
    const GridPath& probe_xi, const GridPath& probe_eta,
    const ModelCheckOptions& opt) {
  const ParamTameMap phi = trivialized_transition(Mx, x, Tx, My, y, Ty);
  const TimeGrid& grid = x.grid;
  const double dt = grid.dt;
  auto scale = phi.scale;
  Rng base(opt.seed);

  // (ii) no kinks: one-sided s-difference quotients agree to O(dt)
  double worst_jump = 0.0;
  for (int m = 0; m < opt.n_samples; ++m) {
    Rng rng = base.fork(static_cast<std::uint64_t>(m));
    const ScaleVector v =
        sample_in_ball(rng, ScaleVector::zero(scale), opt.probe_radius);
    const int i = 1 + static_cast<int>(rng.uniform() * (grid.M - 2));
    const ScaleVector fm = phi.eval(grid.nodes[i - 1], v);
    const ScaleVector f0 = phi.eval(grid.nodes[i], v);
    const ScaleVector fp = phi.eval(grid.nodes[i + 1], v);
    const double jump =
        ((1.0 / dt) * (fp - f0) - (1.0 / dt) * (f0 - fm)).norm(1) /
        (1.0 + f0.norm(1));
    worst_jump = std::max(worst_jump, jump);
  }
  const bool pass_ii = worst_jump <= opt.jump_factor * dt;

  // (iii)/(iv) moduli of continuity of d2 phi_s and d(ds phi)_s: the
  // sampled modulus must contract when the probe distance halves.
  auto d_sdot = [&](int i, const ScaleVector& v, const ScaleVector& e) {
    // FD in v of the nodewise s-derivative
    const double h = 1e-5;
    ScaleVector vp = v, vm = v;
    axpy(h, e, vp);
    axpy(-h, e, vm);
    const double s = grid.nodes[i];
    return (1.0 / (2.0 * h)) * (phi.s_dot(s, vp) - phi.s_dot(s, vm));
  };
  double mod3[2] = {0.0, 0.0}, mod4[2] = {0.0, 0.0};
  const double delta0 = 0.2;
  for (int half = 0; half < 2; ++half) {
    const double delta = delta0 / (half + 1.0) / (half + 1.0);  // 0.2, 0.05
    for (int m = 0; m < opt.n_samples; ++m) {
      Rng rng = base.fork(1000 + static_cast<std::uint64_t>(half * 500 + m));
      const ScaleVector v =
          sample_in_ball(rng, ScaleVector::zero(scale), opt.probe_radius);
      ScaleVector v2 = v;
      axpy(delta, sample_direction(rng, scale), v2);
      const int i = 1 + static_cast<int>(rng.uniform() * (grid.M - 2));
      const ScaleVector a = sample_direction(rng, scale);
      const ScaleVector b = sample_direction(rng, scale);
      const double s = grid.nodes[i];
      mod3[half] = std::max(
          mod3[half], (phi.d2(s, v, a, b) - phi.d2(s, v2, a, b)).norm(1));
      mod4[half] =
          std::max(mod4[half], (d_sdot(i, v, a) - d_sdot(i, v2, a)).norm(1));
    }
  }
  const double floor3 = 1e-4, floor4 = 1e-4;
  const bool pass_iii = mod3[1] <= 0.75 * mod3[0] + floor3;
  const bool pass_iv = mod4[1] <= 0.75 * mod4[0] + floor4;

  // (v) exact s-constancy outside the common horizon, on nodes
  const double T = std::max(x.T, y.T);
  double worst_const = 0.0;
  for (int m = 0; m < opt.n_samples; ++m) {
    Rng rng = base.fork(4000 + static_cast<std::uint64_t>(m));
    const ScaleVector v =
        sample_in_ball(rng, ScaleVector::zero(scale), opt.probe_radius);
    for (int i = 0; i <= grid.M; ++i) {
      const double s = grid.nodes[i];
      if (std::abs(s) < T) continue;
      const double sref = s < 0.0 ? -grid.L : grid.L;
      worst_const = std::max(
          worst_const, (phi.eval(s, v) - phi.eval(sref, v)).norm(1));
    }
    if (m >= 4) break;  // constancy is node-exact, a few fields suffice
  }
  const bool pass_v = worst_const == 0.0;

  // induced map on W^{1,2} fields is C^1: finite-difference probe
  const ParamLiftedMap lifted = make_param_lifted(phi, grid);
  const VerificationReport fd =
      param_c1_fd_check(lifted, probe_xi, probe_eta, opt.h_list, opt.min_order);

  VerificationReport rep;
  rep.check = "model-hypotheses";
  rep.anchor = "model-transition-theorem-hypotheses";
  rep.passed = pass_ii && pass_iii && pass_iv && pass_v && fd.passed;
  rep.margin = std::min({opt.jump_factor * dt - worst_jump,
                         0.75 * mod3[0] + floor3 - mod3[1],
                         0.75 * mod4[0] + floor4 - mod4[1], fd.margin});
  rep.details = {{"worst_s_jump", worst_jump},
                 {"jump_bound", opt.jump_factor * dt},
                 {"d2_modulus", {mod3[0], mod3[1]}},
                 {"dsdot_modulus", {mod4[0], mod4[1]}},
                 {"frozen_tail_residual", worst_const},
                 {"fd", fd.details}};
  if (!pass_ii) rep.witnesses.push_back("kink in the s-dependence");
  if (!pass_iii) rep.witnesses.push_back("second differential modulus did not contract");
  if (!pass_iv) rep.witnesses.push_back("mixed derivative modulus did not contract");
  if (!pass_v) rep.witnesses.push_back("family not frozen outside the horizon");
  if (!fd.passed) rep.witnesses.push_back("induced lift failed the C1 probe");
  return rep;
}

TrivializationChange trivialization_change(const BasicTrivialization& from,
                                           const BasicTrivialization& to) {
  PATHATLAS_REQUIRE(from.frames.size() == to.frames.size(),
                    "trivializations live over different grids");
  TrivializationChange out;
  out.apply = [from, to](const GridPath& xi) {
    std::vector<ScaleVector> vals;
    vals.reserve(xi.values.size());
    for (int i = 0; i < xi.nodes(); ++i)
      vals.push_back(from_eigen(
          xi.scale(), to.frames[i] * (from.frames[i].transpose() *
                                      to_eigen(xi.values[i]))));
    return GridPath::make(xi.grid, std::move(vals));
  };
  out.apply_inverse = [from, to](const GridPath& xi) {
    std::vector<ScaleVector> vals;
    vals.reserve(xi.values.size());
    for (int i = 0; i < xi.nodes(); ++i)
      vals.push_back(from_eigen(
          xi.scale(), from.frames[i] * (to.frames[i].transpose() *
                                        to_eigen(xi.values[i]))));
    return GridPath::make(xi.grid, std::move(vals));
  };
  return out;
}

VerificationReport trivialization_change_report(
    const BasicTrivialization& from, const BasicTrivialization& to,
    const TimeGrid& grid, int n, std::uint64_t seed) {
  const TrivializationChange op = trivialization_change(from, to);
  const int dim = static_cast<int>(from.frames.front().rows());
  auto scale = ScalePair::constant(dim);
  Rng base(seed);

  double norm_fwd = 0.0, norm_inv = 0.0, worst_roundtrip = 0.0;
  for (int m = 0; m < n; ++m) {
    Rng rng = base.fork(static_cast<std::uint64_t>(m));
    // random smooth field with zero tails
    const int waves = 3;
    std::vector<double> amp(static_cast<std::size_t>(dim) * waves),
        phase(amp.size());
    for (auto& a : amp) a = rng.gaussian();
    for (auto& p : phase) p = rng.uniform(0.0, 2.0 * M_PI);
    GridPath xi = sample_path(grid, scale, [&](double s) {
      std::vector<double> c(dim, 0.0);
      const double cut = plateau_cutoff(2.0 * s / grid.L);
      for (int d = 0; d < dim; ++d)
        for (int w = 0; w < waves; ++w)
          c[d] += amp[d * waves + w] *
                  std::sin(0.5 * (w + 1) * s + phase[d * waves + w]) * cut;
      return c;
    });
    const double nx = path_norms(xi).w12;
    if (nx < 1e-12) continue;
    const GridPath fwd = op.apply(xi);
    const GridPath inv = op.apply_inverse(xi);
    norm_fwd = std::max(norm_fwd, path_norms(fwd).w12 / nx);
    norm_inv = std::max(norm_inv, path_norms(inv).w12 / nx);
    const GridPath rt = op.apply_inverse(fwd);
    worst_roundtrip =
        std::max(worst_roundtrip, path_norms(path_sub(rt, xi)).w12 / nx);
  }
  VerificationReport rep;
  rep.check = "trivialization-change";
  rep.anchor = "change-of-frame-isomorphism";
  rep.passed = std::isfinite(norm_fwd) && std::isfinite(norm_inv) &&
               worst_roundtrip <= 1e-12;
  rep.margin = 1e-12 - worst_roundtrip;
  rep.details = {{"op_norm_sampled", norm_fwd},
                 {"inverse_op_norm_sampled", norm_inv},
                 {"worst_roundtrip", worst_roundtrip},
                 {"n_samples", n},
                 {"seed", seed}};
  if (!rep.passed) rep.witnesses.push_back("frame change roundtrip failed");
  return rep;
}

void write_manifold_csv(std::ostream& out, const ManifoldPath& p) {
  const int amb = static_cast<int>(p.points.front().size());
  out << "s";
  for (int k = 0; k < amb; ++k) out << ",x_" << k;
  out << "\n";
  out.precision(17);
  for (int i = 0; i <= p.grid.M; ++i) {
    out << p.grid.nodes[i];
    for (int k = 0; k < amb; ++k) out << "," << p.points[i](k);
    out << "\n";
  }
}

}  // namespace pathatlas
