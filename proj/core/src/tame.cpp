#include "pathatlas/tame.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "pathatlas/errors.hpp"

namespace pathatlas {

Json TamenessCertificate::to_json() const {
  Json j = Json::object();
  j["check"] = "tameness";
  j["center_norms"] = {{"h1", center.norm(1)}, {"h2", center.norm(2)}};
  j["radius"] = radius;
  j["kappa"] = kappa;
  j["max_ratio"] = max_ratio;
  j["n_samples"] = n_samples;
  j["seed"] = seed;
  j["passed"] = passed;
  return j;
}

ScaleVector sample_direction(Rng& rng, const ScaleHandle& scale) {
  ScaleVector v(scale, rng.gaussian_vector(scale->modes()));
  const double n1 = v.norm(1);
  if (n1 > 0.0) v *= 1.0 / n1;
  return v;
}

ScaleVector sample_in_ball(Rng& rng, const ScaleVector& center, double r) {
  ScaleVector dir = sample_direction(rng, center.scale);
  const double dim = static_cast<double>(center.dim());
  const double rho = r * std::pow(rng.uniform(), 1.0 / dim);
  ScaleVector y = center;
  axpy(rho, dir, y);
  return y;
}

namespace {

double tame_bracket(const ScaleVector& y, const ScaleVector& xi,
                    const ScaleVector& eta) {
  return xi.norm(1) * eta.norm(2) + xi.norm(2) * eta.norm(1) +
         y.norm(2) * xi.norm(1) * eta.norm(1);
}

struct RatioScan {
  double max_ratio = 0.0;
  ScaleVector witness_y;
};

RatioScan scan_tame_ratio(const TameMap& map, const ScaleVector& x, double r,
                          int n, std::uint64_t seed) {
  PATHATLAS_REQUIRE(n >= 1, "need at least one sample");
  RatioScan out;
  out.witness_y = x;
  Rng base(seed);
  for (int i = 0; i < n; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    const ScaleVector y = sample_in_ball(rng, x, r);
    if (!map.domain(y))
      throw DomainViolation("tameness sample left the map domain");
    const ScaleVector xi = sample_direction(rng, map.scale);
    const ScaleVector eta = sample_direction(rng, map.scale);
    const double lhs = map.d2(y, xi, eta).norm(2);
    const double ratio = lhs / tame_bracket(y, xi, eta);
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.witness_y = y;
    }
  }
  return out;
}

}  // namespace

TamenessCertificate verify_tameness(const TameMap& map, const ScaleVector& x,
                                    double r, double kappa, int n,
                                    std::uint64_t seed) {
  PATHATLAS_REQUIRE(kappa > 0.0, "kappa must be positive");
  const RatioScan scan = scan_tame_ratio(map, x, r, n, seed);
  TamenessCertificate cert;
  cert.center = x;
  cert.radius = r;
  cert.kappa = kappa;
  cert.n_samples = n;
  cert.seed = seed;
  cert.max_ratio = scan.max_ratio;
  cert.passed = scan.max_ratio <= kappa;
  return cert;
}

double estimate_kappa(const TameMap& map, const ScaleVector& x, double r,
                      int n, std::uint64_t seed) {
  const RatioScan scan = scan_tame_ratio(map, x, r, n, seed);
  return std::max(scan.max_ratio * 1.1, 1e-12);
}

VerificationReport check_derived_estimates(const TameMap& map,
                                           const ScaleVector& x, double r,
                                           double kappa,
                                           DerivedEstimateMode mode, int n,
                                           std::uint64_t seed) {
  const bool do0 = mode == DerivedEstimateMode::Zeroth || mode == DerivedEstimateMode::All;
  const bool do1 = mode == DerivedEstimateMode::First || mode == DerivedEstimateMode::All;
  const bool dod = mode == DerivedEstimateMode::Difference || mode == DerivedEstimateMode::All;

  double k0 = 0.0, k1 = 0.0, kd = 0.0;
  Rng base(seed);
  for (int i = 0; i < n; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    const ScaleVector y0 = sample_in_ball(rng, x, r);
    const ScaleVector y1 = sample_in_ball(rng, x, r);
    if (!map.domain(y0) || !map.domain(y1))
      throw DomainViolation("derived-estimate sample left the map domain");
    const ScaleVector eta = sample_direction(rng, map.scale);
    if (do0) k0 = std::max(k0, map.eval(y0).norm(2) / (1.0 + y0.norm(2)));
    if (do1)
      k1 = std::max(k1, map.d1(y0, eta).norm(2) /
                            (eta.norm(2) + y0.norm(2) * eta.norm(1)));
    if (dod) {
      const ScaleVector diff = y1 - y0;
      const double lhs = (map.d1(y1, eta) - map.d1(y0, eta)).norm(2);
      const double bracket =
          diff.norm(1) * eta.norm(2) + diff.norm(2) * eta.norm(1) +
          0.5 * (y1.norm(2) + y0.norm(2)) * diff.norm(1) * eta.norm(1);
      if (bracket > 0.0) kd = std::max(kd, lhs / bracket);
    }
  }

  VerificationReport rep;
  rep.check = "derived-estimates";
  rep.anchor = "tame-derived-bounds";
  rep.passed = std::isfinite(k0) && std::isfinite(k1) && std::isfinite(kd);
  rep.margin = rep.passed ? 1.0 : -1.0;
  rep.details = {{"kappa", kappa}, {"n_samples", n}, {"seed", seed}};
  if (do0) rep.details["kappa0_fitted"] = k0;
  if (do1) rep.details["kappa1_fitted"] = k1;
  if (dod) rep.details["kappa_diff_fitted"] = kd;
  return rep;
}

TameMap compose(const TameMap& psi_, const TameMap& phi_) {
  PATHATLAS_REQUIRE(same_scale(psi_.scale, phi_.scale),
                    "composition needs a shared scale");
  // share the submaps so nested compositions stay cheap to build and copy
  const auto psi = std::make_shared<const TameMap>(psi_);
  const auto phi = std::make_shared<const TameMap>(phi_);
  TameMap out;
  out.scale = phi->scale;
  out.fixes_origin = phi->fixes_origin && psi->fixes_origin;
  out.domain = [psi, phi](const ScaleVector& x) {
    return phi->domain(x) && psi->domain(phi->eval(x));
  };
  out.eval = [psi, phi](const ScaleVector& x) {
    return psi->eval(phi->eval(x));
  };
  out.d1 = [psi, phi](const ScaleVector& x, const ScaleVector& eta) {
    return psi->d1(phi->eval(x), phi->d1(x, eta));
  };
  out.d2 = [psi, phi](const ScaleVector& x, const ScaleVector& xi,
                      const ScaleVector& eta) {
    const ScaleVector px = phi->eval(x);
    ScaleVector term = psi->d2(px, phi->d1(x, xi), phi->d1(x, eta));
    term += psi->d1(px, phi->d2(x, xi, eta));
    return term;
  };
  return out;
}

double composition_kappa(double kappa) {
  return 3.0 * kappa * kappa * kappa + 2.0 * kappa * kappa;
}

bool check_composable(const TameMap& psi, const TameMap& phi,
                      const ScaleVector& x, double r, int n,
                      std::uint64_t seed) {
  Rng base(seed);
  for (int i = 0; i < n; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    const ScaleVector y = sample_in_ball(rng, x, r);
    if (!phi.domain(y) || !psi.domain(phi.eval(y))) return false;
  }
  return true;
}

double enlarged_kappa(const TameMap& map, const ScaleVector& x, double r,
                      double kappa, int n, std::uint64_t seed) {
  double k = kappa;
  Rng base(seed);
  for (int i = 0; i < n; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    const ScaleVector y = sample_in_ball(rng, x, r);
    if (!map.domain(y))
      throw DomainViolation("kappa-enlargement sample left the map domain");
    const ScaleVector xi = sample_direction(rng, map.scale);
    const ScaleVector eta = sample_direction(rng, map.scale);
    const ScaleVector fy = map.eval(y);
    const ScaleVector dy = map.d1(y, eta);
    const ScaleVector d2y = map.d2(y, xi, eta);
    // two-level estimates
    k = std::max(k, fy.norm(2) / (1.0 + y.norm(2)));
    k = std::max(k, dy.norm(2) / (eta.norm(2) + y.norm(2) * eta.norm(1)));
    k = std::max(k, d2y.norm(2) / tame_bracket(y, xi, eta));
    // level-1 estimates
    k = std::max(k, fy.norm(1));
    k = std::max(k, dy.norm(1) / eta.norm(1));
    k = std::max(k, d2y.norm(1) / (xi.norm(1) * eta.norm(1)));
  }
  return k;
}

ScalarMap scalar_sine_map(double c) {
  ScalarMap m;
  m.f = [c](double u) { return u + c * std::sin(u); };
  m.d1 = [c](double u) { return 1.0 + c * std::cos(u); };
  m.d2 = [c](double u) { return -c * std::sin(u); };
  m.d3 = [c](double u) { return -c * std::cos(u); };
  m.d4 = [c](double u) { return c * std::sin(u); };
  return m;
}

ScalarMap scalar_identity_map() {
  ScalarMap m;
  m.f = [](double u) { return u; };
  m.d1 = [](double) { return 1.0; };
  m.d2 = [](double) { return 0.0; };
  m.d3 = [](double) { return 0.0; };
  m.d4 = [](double) { return 0.0; };
  return m;
}

ScalarMap scalar_shift_map(double c) {
  ScalarMap m = scalar_identity_map();
  m.f = [c](double u) { return u + c; };
  return m;
}

namespace {

/// Shared collocation table for loop maps: angles, cos/sin values, and
/// the analysis/synthesis sums.
struct LoopProjector {
  int K = 0;
  int N = 0;
  std::vector<double> cos_tab;  // [k * N + m] = cos(k t_m), k = 0..K
  std::vector<double> sin_tab;

  LoopProjector(int K_, int N_) : K(K_), N(N_) {
    cos_tab.resize(static_cast<std::size_t>(K + 1) * N);
    sin_tab.resize(static_cast<std::size_t>(K + 1) * N);
    for (int k = 0; k <= K; ++k)
      for (int m = 0; m < N; ++m) {
        const double a = 2.0 * M_PI * k * m / N;
        cos_tab[static_cast<std::size_t>(k) * N + m] = std::cos(a);
        sin_tab[static_cast<std::size_t>(k) * N + m] = std::sin(a);
      }
  }

  std::vector<double> synthesize(const std::vector<double>& c) const {
    std::vector<double> x(N, c[0]);
    for (int k = 1; k <= K; ++k) {
      const double* ck = &cos_tab[static_cast<std::size_t>(k) * N];
      const double* sk = &sin_tab[static_cast<std::size_t>(k) * N];
      const double a = c[2 * k - 1], b = c[2 * k];
      for (int m = 0; m < N; ++m) x[m] += a * ck[m] + b * sk[m];
    }
    return x;
  }

  std::vector<double> analyze(const std::vector<double>& x) const {
    std::vector<double> c(2 * K + 1, 0.0);
    double mean = 0.0;
    for (int m = 0; m < N; ++m) mean += x[m];
    c[0] = mean / N;
    for (int k = 1; k <= K; ++k) {
      const double* ck = &cos_tab[static_cast<std::size_t>(k) * N];
      const double* sk = &sin_tab[static_cast<std::size_t>(k) * N];
      double a = 0.0, b = 0.0;
      for (int m = 0; m < N; ++m) {
        a += x[m] * ck[m];
        b += x[m] * sk[m];
      }
      c[2 * k - 1] = 2.0 * a / N;
      c[2 * k] = 2.0 * b / N;
    }
    return c;
  }
};

}  // namespace

double loop_synthesis(const ScaleVector& x, double t) {
  const int K = (x.dim() - 1) / 2;
  double v = x.c[0];
  for (int k = 1; k <= K; ++k)
    v += x.c[2 * k - 1] * std::cos(k * t) + x.c[2 * k] * std::sin(k * t);
  return v;
}

TameMap loop_transition_map(const ScalarMap& phi, int K, int n_colloc) {
  PATHATLAS_REQUIRE(K >= 0, "loop transition needs K >= 0");
  PATHATLAS_REQUIRE(n_colloc >= 4 * K + 1,
                    "collocation count must be at least 4K+1");
  auto scale = ScalePair::loop(K);
  auto proj = std::make_shared<const LoopProjector>(K, n_colloc);

  TameMap out;
  out.scale = scale;
  out.domain = [](const ScaleVector&) { return true; };
  out.fixes_origin = std::abs(phi.f(0.0)) <= 1e-15;
  out.eval = [proj, phi, scale](const ScaleVector& x) {
    std::vector<double> xs = proj->synthesize(x.c);
    for (auto& v : xs) v = phi.f(v);
    return ScaleVector(scale, proj->analyze(xs));
  };
  out.d1 = [proj, phi, scale](const ScaleVector& x, const ScaleVector& eta) {
    const std::vector<double> xs = proj->synthesize(x.c);
    std::vector<double> es = proj->synthesize(eta.c);
    for (int m = 0; m < proj->N; ++m) es[m] *= phi.d1(xs[m]);
    return ScaleVector(scale, proj->analyze(es));
  };
  out.d2 = [proj, phi, scale](const ScaleVector& x, const ScaleVector& xi,
                              const ScaleVector& eta) {
    const std::vector<double> xs = proj->synthesize(x.c);
    const std::vector<double> us = proj->synthesize(xi.c);
    std::vector<double> es = proj->synthesize(eta.c);
    for (int m = 0; m < proj->N; ++m) es[m] *= phi.d2(xs[m]) * us[m];
    return ScaleVector(scale, proj->analyze(es));
  };
  return out;
}

TameMap constant_scale_map(
    int n, std::function<std::vector<double>(const std::vector<double>&)> f,
    std::function<std::vector<double>(const std::vector<double>&,
                                      const std::vector<double>&)> d1,
    std::function<std::vector<double>(const std::vector<double>&,
                                      const std::vector<double>&,
                                      const std::vector<double>&)> d2) {
  auto scale = ScalePair::constant(n);
  TameMap out;
  out.scale = scale;
  out.domain = [](const ScaleVector&) { return true; };
  {
    const std::vector<double> zero(n, 0.0);
    std::vector<double> fz = f(zero);
    double nz = 0.0;
    for (double v : fz) nz += v * v;
    out.fixes_origin = nz <= 1e-30;
  }
  out.eval = [f, scale](const ScaleVector& x) {
    return ScaleVector(scale, f(x.c));
  };
  out.d1 = [d1, scale](const ScaleVector& x, const ScaleVector& eta) {
    return ScaleVector(scale, d1(x.c, eta.c));
  };
  out.d2 = [d2, scale](const ScaleVector& x, const ScaleVector& xi,
                       const ScaleVector& eta) {
    return ScaleVector(scale, d2(x.c, xi.c, eta.c));
  };
  return out;
}

TameMap identity_map(const ScaleHandle& scale) {
  TameMap out;
  out.scale = scale;
  out.fixes_origin = true;
  out.domain = [](const ScaleVector&) { return true; };
  out.eval = [](const ScaleVector& x) { return x; };
  out.d1 = [](const ScaleVector&, const ScaleVector& eta) { return eta; };
  out.d2 = [scale](const ScaleVector&, const ScaleVector&, const ScaleVector&) {
    return ScaleVector::zero(scale);
  };
  return out;
}

TameMap translation_map(const ScaleVector& c) {
  TameMap out = identity_map(c.scale);
  out.fixes_origin = c.norm(2) == 0.0;
  out.eval = [c](const ScaleVector& x) { return x + c; };
  return out;
}

TameMap linear_map(const ScaleHandle& scale,
                   std::function<ScaleVector(const ScaleVector&)> apply) {
  TameMap out;
  out.scale = scale;
  out.fixes_origin = true;
  out.domain = [](const ScaleVector&) { return true; };
  out.eval = apply;
  out.d1 = [apply](const ScaleVector&, const ScaleVector& eta) {
    return apply(eta);
  };
  out.d2 = [scale](const ScaleVector&, const ScaleVector&, const ScaleVector&) {
    return ScaleVector::zero(scale);
  };
  return out;
}

TameMap diagonal_map(const ScaleHandle& scale, const std::vector<double>& d) {
  PATHATLAS_REQUIRE(static_cast<int>(d.size()) == scale->modes(),
                    "diagonal length mismatch");
  return linear_map(scale, [d](const ScaleVector& x) {
    ScaleVector y = x;
    for (int k = 0; k < y.dim(); ++k) y.c[k] *= d[k];
    return y;
  });
}

VerificationReport check_differentials(const TameMap& map,
                                       const ScaleVector& x, double r, int n,
                                       std::uint64_t seed, double step,
                                       double tol) {
  double worst_d1 = 0.0, worst_d2 = 0.0, worst_sym = 0.0;
  Rng base(seed);
  for (int i = 0; i < n; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    const ScaleVector y = sample_in_ball(rng, x, r);
    if (!map.domain(y)) throw DomainViolation("differential check left domain");
    const ScaleVector xi = sample_direction(rng, map.scale);
    const ScaleVector eta = sample_direction(rng, map.scale);

    ScaleVector yp = y, ym = y;
    axpy(step, eta, yp);
    axpy(-step, eta, ym);
    const ScaleVector fd1 = (1.0 / (2.0 * step)) * (map.eval(yp) - map.eval(ym));
    const ScaleVector an1 = map.d1(y, eta);
    worst_d1 = std::max(worst_d1, (an1 - fd1).norm(2) / (1.0 + an1.norm(2)));

    ScaleVector zp = y, zm = y;
    axpy(step, xi, zp);
    axpy(-step, xi, zm);
    const ScaleVector fd2 =
        (1.0 / (2.0 * step)) * (map.d1(zp, eta) - map.d1(zm, eta));
    const ScaleVector an2 = map.d2(y, xi, eta);
    worst_d2 = std::max(worst_d2, (an2 - fd2).norm(2) / (1.0 + an2.norm(2)));

    const double sym = (map.d2(y, xi, eta) - map.d2(y, eta, xi)).norm(1) /
                       (1.0 + xi.norm(1) * eta.norm(1));
    worst_sym = std::max(worst_sym, sym);
  }
  VerificationReport rep;
  rep.check = "differential-consistency";
  rep.anchor = "map-differential-contract";
  rep.passed = worst_d1 <= tol && worst_d2 <= tol && worst_sym <= 1e-10;
  rep.margin = tol - std::max(worst_d1, worst_d2);
  rep.details = {{"step", step},
                 {"tol", tol},
                 {"n_samples", n},
                 {"seed", seed},
                 {"worst_d1_error", worst_d1},
                 {"worst_d2_error", worst_d2},
                 {"worst_d2_asymmetry", worst_sym}};
  if (!rep.passed) rep.witnesses.push_back("finite-difference mismatch");
  return rep;
}

}  // namespace pathatlas
