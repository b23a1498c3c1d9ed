#include "pathatlas/fixtures.hpp"

#include <cmath>

#include "pathatlas/errors.hpp"
#include "pathatlas/linalg.hpp"

namespace pathatlas::fixtures {

TameMap scalar_tame(const ScalarMap& m) {
  return constant_scale_map(
      1, [m](const std::vector<double>& x) { return std::vector<double>{m.f(x[0])}; },
      [m](const std::vector<double>& x, const std::vector<double>& e) {
        return std::vector<double>{m.d1(x[0]) * e[0]};
      },
      [m](const std::vector<double>& x, const std::vector<double>& a,
          const std::vector<double>& b) {
        return std::vector<double>{m.d2(x[0]) * a[0] * b[0]};
      });
}

TameMap matrix_map(const ScaleHandle& scale, const Eigen::MatrixXd& A) {
  PATHATLAS_REQUIRE(A.rows() == scale->modes() && A.cols() == scale->modes(),
                    "matrix size mismatch");
  return linear_map(scale, [scale, A](const ScaleVector& x) {
    return from_eigen(scale, A * to_eigen(x));
  });
}

namespace {
double pair_euclid(const ScaleVector& a, const ScaleVector& x) {
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) s += a.c[k] * x.c[k];
  return s;
}
}  // namespace

TameMap shear_map(const ScaleHandle& scale, const ScaleVector& a,
                  const ScaleVector& b, const ScalarMap& g) {
  PATHATLAS_REQUIRE(std::abs(pair_euclid(a, b)) < 1e-14,
                    "shear needs <a,b> = 0");
  TameMap out;
  out.scale = scale;
  out.fixes_origin = std::abs(g.f(0.0)) <= 1e-15;
  out.domain = [](const ScaleVector&) { return true; };
  out.eval = [a, b, g](const ScaleVector& u) {
    ScaleVector y = u;
    axpy(g.f(pair_euclid(a, u)), b, y);
    return y;
  };
  out.d1 = [a, b, g](const ScaleVector& u, const ScaleVector& e) {
    ScaleVector y = e;
    axpy(g.d1(pair_euclid(a, u)) * pair_euclid(a, e), b, y);
    return y;
  };
  out.d2 = [a, b, g, scale](const ScaleVector& u, const ScaleVector& xi,
                            const ScaleVector& e) {
    ScaleVector y = ScaleVector::zero(scale);
    axpy(g.d2(pair_euclid(a, u)) * pair_euclid(a, xi) * pair_euclid(a, e), b,
         y);
    return y;
  };
  return out;
}

TameMap shear_map_inverse(const ScaleHandle& scale, const ScaleVector& a,
                          const ScaleVector& b, const ScalarMap& g) {
  // <a, u + g(<a,u>) b> = <a,u>, so the inverse is the opposite shear
  ScalarMap neg;
  neg.f = [g](double t) { return -g.f(t); };
  neg.d1 = [g](double t) { return -g.d1(t); };
  neg.d2 = [g](double t) { return -g.d2(t); };
  neg.d3 = [g](double t) { return -g.d3(t); };
  neg.d4 = [g](double t) { return -g.d4(t); };
  return shear_map(scale, a, b, neg);
}

ChartMap ball_chart(TameMap fwd, TameMap inv, const ScaleVector& center,
                    double rho) {
  ChartMap out;
  out.boundary_margin = [center, rho](const ScaleVector& u) {
    return rho - (u - center).norm(1);
  };
  fwd.domain = [center, rho](const ScaleVector& u) {
    return (u - center).norm(1) < rho;
  };
  const TameMap inv_core = inv;
  inv.domain = [inv_core, center, rho](const ScaleVector& p) {
    return (inv_core.eval(p) - center).norm(1) < rho;
  };
  out.fwd = std::move(fwd);
  out.inv = std::move(inv);
  return out;
}

GridPath random_bump_path(const TimeGrid& grid, const ScaleHandle& scale,
                          Rng& rng, double amplitude) {
  const int dim = scale->modes();
  const int waves = 3;
  std::vector<double> amp(static_cast<std::size_t>(dim) * waves);
  std::vector<double> freq(amp.size()), phase(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i) {
    amp[i] = rng.gaussian();
    freq[i] = 0.4 + 1.2 * rng.uniform();
    phase[i] = rng.uniform(0.0, 2.0 * M_PI);
  }
  GridPath p = sample_path(grid, scale, [&](double s) {
    std::vector<double> c(dim, 0.0);
    const double cut = plateau_cutoff(2.4 * s / grid.L);
    for (int d = 0; d < dim; ++d)
      for (int w = 0; w < waves; ++w) {
        const std::size_t i = static_cast<std::size_t>(d) * waves + w;
        c[d] += amp[i] * std::sin(freq[i] * s + phase[i]) * cut;
      }
    return c;
  });
  const double n = path_norms(p).w12;
  return n > 0.0 ? path_scale(amplitude / n, p) : p;
}

namespace {

ScaleVector coeff(const ScaleHandle& scale,
                  std::initializer_list<std::pair<int, double>> entries) {
  ScaleVector v = ScaleVector::zero(scale);
  for (const auto& [k, val] : entries) v.c[static_cast<std::size_t>(k)] = val;
  return v;
}

ScalarMap sine_profile(double amp, double freq, double phase) {
  ScalarMap m;
  m.f = [=](double t) { return amp * std::sin(freq * t + phase); };
  m.d1 = [=](double t) { return amp * freq * std::cos(freq * t + phase); };
  m.d2 = [=](double t) { return -amp * freq * freq * std::sin(freq * t + phase); };
  m.d3 = [=](double t) { return -amp * freq * freq * freq * std::cos(freq * t + phase); };
  m.d4 = [=](double t) { return amp * freq * freq * freq * freq * std::sin(freq * t + phase); };
  return m;
}

/// psi(u) = shear(u) + c with closed-form inverse.
struct WarpChart {
  TameMap fwd_core, inv_core;
};

WarpChart warp_chart(const ScaleHandle& scale, const ScaleVector& a,
                     const ScaleVector& b, const ScalarMap& g,
                     const ScaleVector& c) {
  const TameMap W = shear_map(scale, a, b, g);
  const TameMap Winv = shear_map_inverse(scale, a, b, g);
  WarpChart out;
  out.fwd_core = compose(translation_map(c), W);
  out.inv_core = compose(Winv, translation_map(-1.0 * c));
  return out;
}

}  // namespace

WarpedAtlasFixture make_warped_atlas(int k, int variant, const TimeGrid& grid) {
  PATHATLAS_REQUIRE(k == 2 || k == 3, "warped atlas supports k = 2 or 3");
  PATHATLAS_REQUIRE(variant == 0 || variant == 1, "variant must be 0 or 1");
  WarpedAtlasFixture fx;
  fx.scale = ScalePair::loop(4);
  fx.grid = grid;
  const ScaleHandle scale = fx.scale;
  const double T = 2.0;
  PATHATLAS_REQUIRE(grid.L > T, "warped atlas needs L > 2");

  // curved basic path between fixed endpoints; variant 1 takes a nearby
  // profile and arc so transitions stay well inside both chart systems
  const ScaleVector xm = coeff(scale, {{0, -0.5}, {1, 0.4}});
  const ScaleVector xp = coeff(scale, {{0, 0.5}, {1, 0.4}, {2, 0.25}});
  const ScaleVector arc = variant == 0
                              ? coeff(scale, {{3, 0.30}})
                              : coeff(scale, {{3, 0.27}, {4, 0.03}});
  const double blend = variant == 0 ? 0.0 : 0.15;
  auto profile = [T, blend](double s) {
    const double u = (s + T) / (2.0 * T);
    const double s1 = smoothstep(u);
    return (1.0 - blend) * s1 + blend * smoothstep(s1);
  };
  auto path_at = [=](double s) {
    const double t = profile(s);
    ScaleVector v = xm;
    axpy(t, xp - xm, v);
    axpy(t * (1.0 - t), arc, v);
    return v;
  };
  fx.path = make_basic_path(grid, path_at, T);

  // junction times and interpolation starts
  if (k == 2) {
    fx.raw.times = variant == 0 ? std::vector<double>{0.0}
                                : std::vector<double>{0.25};
    fx.t_minus = variant == 0 ? std::vector<double>{-0.5}
                              : std::vector<double>{-0.2};
  } else {
    fx.raw.times = variant == 0 ? std::vector<double>{-0.9, 0.9}
                                : std::vector<double>{-0.7, 1.05};
    fx.t_minus = variant == 0 ? std::vector<double>{-1.4, 0.4}
                              : std::vector<double>{-1.2, 0.55};
  }

  // shear-warped charts; directions are unit coefficient axes so the
  // orthogonality <a,b> = 0 is exact
  struct Params {
    int a, b;
    double amp, freq, phase;
    double cshift;
  };
  std::vector<Params> params;
  if (variant == 0)
    params = {{0, 3, 0.10, 1.0, 0.3, 0.08},
              {1, 2, 0.12, 0.8, -0.4, -0.06},
              {2, 5, 0.09, 1.1, 0.9, 0.05}};
  else
    params = {{1, 4, 0.11, 0.9, 0.7, -0.05},
              {0, 5, 0.10, 1.2, -0.2, 0.07},
              {3, 6, 0.08, 1.0, 0.5, -0.04}};

  std::vector<WarpChart> cores;
  for (int i = 0; i < k; ++i) {
    const Params& pr = params[static_cast<std::size_t>(i)];
    const ScaleVector a = ScaleVector::basis(scale, pr.a);
    const ScaleVector b = ScaleVector::basis(scale, pr.b);
    const ScaleVector c = coeff(scale, {{pr.b, pr.cshift}, {0, -pr.cshift}});
    cores.push_back(
        warp_chart(scale, a, b, sine_profile(pr.amp, pr.freq, pr.phase), c));
  }

  // chart domains: balls around the representation of the chart's leg
  // (including the adjacent interpolation intervals, with headroom)
  const auto leg_window = [&](int i) -> std::pair<double, double> {
    const double lo = i == 0 ? -grid.L : fx.t_minus[i - 1] - 0.2;
    const double hi =
        i == k - 1 ? grid.L : fx.raw.times[static_cast<std::size_t>(i)] + 0.2;
    return {lo, hi};
  };
  for (int i = 0; i < k; ++i) {
    const auto [lo, hi] = leg_window(i);
    ScaleVector center = ScaleVector::zero(scale);
    int count = 0;
    for (double s : grid.nodes)
      if (s >= lo && s <= hi) {
        center += cores[i].inv_core.eval(path_at(s));
        ++count;
      }
    center *= 1.0 / count;
    double rho = 0.0;
    for (double s : grid.nodes)
      if (s >= lo && s <= hi)
        rho = std::max(
            rho, (cores[i].inv_core.eval(path_at(s)) - center).norm(1));
    rho += 2.5;
    fx.raw.charts.push_back(
        ball_chart(cores[i].fwd_core, cores[i].inv_core, center, rho));
  }

  // a deliberate linear twist at chart 2: the raw covering violates the
  // identity-junction condition until normalize_covering removes it
  Eigen::MatrixXd twist =
      Eigen::MatrixXd::Identity(scale->modes(), scale->modes());
  const double ang = variant == 0 ? 0.15 : -0.12;
  twist(0, 0) = std::cos(ang);
  twist(0, 1) = -std::sin(ang);
  twist(1, 0) = std::sin(ang);
  twist(1, 1) = std::cos(ang);
  twist(3, 3) = 1.05;
  fx.raw.charts[1] = precompose_chart(fx.raw.charts[1], twist);

  return fx;
}

PathChart calibrated_chart(const WarpedAtlasFixture& fx,
                           const CalibrationOptions& opt) {
  const ChartCollection cov = normalize_covering(fx.raw, fx.path);
  return build_path_chart(cov, fx.path, fx.t_minus, opt);
}

namespace {
Vec unit3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v / v.norm();
}
}  // namespace

ManifoldPath sphere_basic_path(const TimeGrid& grid, double T, int variant) {
  const Vec qm = unit3(1.0, 0.2, 0.0);
  const Vec qp = unit3(0.1, 1.0, 0.3);
  Vec n(3);
  n << qm(1) * qp(2) - qm(2) * qp(1), qm(2) * qp(0) - qm(0) * qp(2),
      qm(0) * qp(1) - qm(1) * qp(0);
  n /= n.norm();
  const double bend = variant == 0 ? 0.18 : 0.10;
  const double blend = variant == 0 ? 0.0 : 0.15;
  auto at = [=](double s) -> Vec {
    const double u = std::clamp((s + T) / (2.0 * T), 0.0, 1.0);
    const double s1 = smoothstep(u);
    const double t = (1.0 - blend) * s1 + blend * smoothstep(s1);
    const double omega = std::acos(std::clamp(qm.dot(qp), -1.0, 1.0));
    Vec q = (std::sin((1.0 - t) * omega) * qm + std::sin(t * omega) * qp) /
            std::sin(omega);
    q += bend * t * (1.0 - t) * n;
    return q / q.norm();
  };
  return make_manifold_path(sphere_geometry(), grid, at, T);
}

ManifoldPath plane_basic_path(const TimeGrid& grid, double T, int variant) {
  const double bend = variant == 0 ? 0.30 : 0.22;
  const double blend = variant == 0 ? 0.0 : 0.15;
  auto at = [=](double s) -> Vec {
    const double u = std::clamp((s + T) / (2.0 * T), 0.0, 1.0);
    const double s1 = smoothstep(u);
    const double t = (1.0 - blend) * s1 + blend * smoothstep(s1);
    Vec q(2);
    q << -0.4 + 0.8 * t, bend * t * (1.0 - t);
    return q;
  };
  return make_manifold_path(flat_geometry(2), grid, at, T);
}

}  // namespace pathatlas::fixtures
