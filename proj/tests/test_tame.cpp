#include <doctest.h>

#include <cmath>

#include "pathatlas/fixtures.hpp"
#include "pathatlas/tame.hpp"

using namespace pathatlas;

TEST_CASE("identity map certificate is free") {
  auto s = ScalePair::loop(2);
  const TameMap id = identity_map(s);
  const ScaleVector x = ScaleVector::basis(s, 1, 0.7);
  const TamenessCertificate cert = verify_tameness(id, x, 0.5, 1e-6, 100, 7);
  CHECK(cert.passed);
  CHECK(cert.max_ratio == 0.0);
  CHECK(estimate_kappa(id, x, 0.5, 100, 7) == 1e-12);
}

TEST_CASE("scalar square map has ratio at most one") {
  // phi(u) = u^2 on the constant scale: d2 phi = 2 xi eta, and the
  // bracket contains 2|xi||eta|, so the ratio never exceeds 1
  const TameMap sq = fixtures::scalar_tame(
      {[](double u) { return u * u; }, [](double u) { return 2.0 * u; },
       [](double) { return 2.0; }, [](double) { return 0.0; },
       [](double) { return 0.0; }});
  auto s = sq.scale;
  const ScaleVector origin = ScaleVector::zero(s);
  const TamenessCertificate cert = verify_tameness(sq, origin, 0.5, 1.0, 400, 3);
  CHECK(cert.passed);
  CHECK(cert.max_ratio <= 1.0);
  CHECK(cert.max_ratio > 0.9);  // the sup 1 is approached near y = 0
  const double k = estimate_kappa(sq, origin, 0.5, 400, 3);
  CHECK(std::abs(k - 1.1) <= 0.02);
}

TEST_CASE("linear maps sit at the kappa floor") {
  auto s = ScalePair::loop(3);
  std::vector<double> d(s->modes(), 1.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += 0.1 * i;
  // not a valid two-level contraction, but bounded on both levels
  const TameMap lin = diagonal_map(s, d);
  const ScaleVector x = ScaleVector::basis(s, 0, 0.4);
  CHECK(estimate_kappa(lin, x, 1.0, 200, 5) == 1e-12);
  CHECK(verify_tameness(lin, x, 1.0, 1e-9, 200, 5).passed);
}

TEST_CASE("built-in maps pass the differential contract") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 4, 64);
  const ScaleVector x = ScaleVector::basis(phi.scale, 1, 1.0);
  const VerificationReport rep = check_differentials(phi, x, 0.5, 50, 11);
  CHECK(rep.passed);
  CHECK(rep.details["worst_d2_asymmetry"].get<double>() <= 1e-10);
}

TEST_CASE("loop transition map basics") {
  const int K = 3;
  const TameMap id = loop_transition_map(scalar_identity_map(), K, 32);
  auto s = id.scale;
  const ScaleVector x(s, {0.2, 1.0, -0.4, 0.1, 0.6, 0.0, -0.2});
  CHECK((id.eval(x) - x).norm(2) <= 1e-13);

  const TameMap shift = loop_transition_map(scalar_shift_map(0.7), K, 32);
  const ScaleVector y = shift.eval(x);
  CHECK(y.c[0] == doctest::Approx(x.c[0] + 0.7).epsilon(1e-14));
  for (int k = 1; k < s->modes(); ++k)
    CHECK(y.c[k] == doctest::Approx(x.c[k]).epsilon(1e-13));
}

TEST_CASE("loop transition matches a dense collocation oracle") {
  const int K = 6;
  const ScalarMap f = scalar_sine_map(0.3);
  const TameMap phi = loop_transition_map(f, K, 64);
  ScaleVector x = ScaleVector::zero(phi.scale);
  x.c[1] = 1.0;  // x(t) = cos t

  // oracle: project pointwise phi(x(t)) on 4096 equispaced points
  const int N = 4096;
  std::vector<double> dense(2 * K + 1, 0.0);
  for (int m = 0; m < N; ++m) {
    const double t = 2.0 * M_PI * m / N;
    const double v = f.f(std::cos(t));
    dense[0] += v / N;
    for (int k = 1; k <= K; ++k) {
      dense[2 * k - 1] += 2.0 * v * std::cos(k * t) / N;
      dense[2 * k] += 2.0 * v * std::sin(k * t) / N;
    }
  }
  const ScaleVector got = phi.eval(x);
  double err2 = 0.0;
  for (int k = 0; k < got.dim(); ++k) {
    const double d = got.c[k] - dense[k];
    err2 += d * d;
  }
  CHECK(std::sqrt(err2) <= 1e-6);
}

TEST_CASE("collocation count below 4K+1 is rejected") {
  CHECK_THROWS_AS(loop_transition_map(scalar_identity_map(), 6, 20),
                  InvalidArgument);
}

TEST_CASE("tameness certificate for the loop transition map") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 6, 64);
  const ScaleVector x = ScaleVector::basis(phi.scale, 1, 1.0);
  const double kappa_hat = estimate_kappa(phi, x, 0.5, 300, 13);
  const TamenessCertificate cert =
      verify_tameness(phi, x, 0.5, kappa_hat, 1000, 14);
  CHECK(cert.passed);
  // monotone: larger kappa still passes
  CHECK(verify_tameness(phi, x, 0.5, 2 * kappa_hat, 1000, 14).passed);
}

TEST_CASE("derived estimates fit finite constants") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 4, 64);
  const ScaleVector x = ScaleVector::basis(phi.scale, 1, 1.0);
  const VerificationReport rep = check_derived_estimates(
      phi, x, 0.5, 1.0, DerivedEstimateMode::All, 200, 15);
  CHECK(rep.passed);
  CHECK(rep.details["kappa0_fitted"].get<double>() > 0.0);
  CHECK(rep.details["kappa1_fitted"].get<double>() > 0.0);

  // linear diagonal map: its level-2 operator norm 1.3 suffices as
  // kappa1, so the fitted ratio never exceeds it
  std::vector<double> d(phi.scale->modes(), 1.3);
  const TameMap lin = diagonal_map(phi.scale, d);
  const VerificationReport lrep = check_derived_estimates(
      lin, x, 0.5, 1.0, DerivedEstimateMode::First, 200, 16);
  const double fitted = lrep.details["kappa1_fitted"].get<double>();
  CHECK(fitted > 0.0);
  CHECK(fitted <= 1.3 + 1e-12);
}

TEST_CASE("composition carries the predicted constant") {
  const int K = 4;
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), K, 64);
  const TameMap psi = loop_transition_map(scalar_sine_map(-0.25), K, 64);
  const ScaleVector x = ScaleVector::basis(phi.scale, 1, 1.0);
  const double r = 0.4;
  REQUIRE(check_composable(psi, phi, x, r, 50, 17));
  double kappa = enlarged_kappa(phi, x, r, 0.0, 300, 18);
  kappa = enlarged_kappa(psi, phi.eval(x), 1.5 * r, kappa, 300, 19);
  const double kp = composition_kappa(kappa);
  CHECK(kp == doctest::Approx(3 * kappa * kappa * kappa + 2 * kappa * kappa));
  const TamenessCertificate cert =
      verify_tameness(compose(psi, phi), x, r, kp, 500, 20);
  CHECK(cert.passed);
}

TEST_CASE("composition of linear maps has vanishing second derivative") {
  auto s = ScalePair::loop(2);
  std::vector<double> d(s->modes(), 0.8);
  const TameMap lin = diagonal_map(s, d);
  const TameMap both = compose(lin, lin);
  Rng rng(21);
  const ScaleVector y(s, rng.gaussian_vector(s->modes()));
  const ScaleVector a(s, rng.gaussian_vector(s->modes()));
  const ScaleVector b(s, rng.gaussian_vector(s->modes()));
  CHECK(both.d2(y, a, b).norm(2) == 0.0);
}

TEST_CASE("constant scale map with hand-computed second derivative") {
  // f(u,v) = (u^2, uv): d2 f((a1,a2),(b1,b2)) = (2 a1 b1, a1 b2 + a2 b1)
  const TameMap f = constant_scale_map(
      2,
      [](const std::vector<double>& x) {
        return std::vector<double>{x[0] * x[0], x[0] * x[1]};
      },
      [](const std::vector<double>& x, const std::vector<double>& e) {
        return std::vector<double>{2 * x[0] * e[0], x[0] * e[1] + x[1] * e[0]};
      },
      [](const std::vector<double>&, const std::vector<double>& a,
         const std::vector<double>& b) {
        return std::vector<double>{2 * a[0] * b[0], a[0] * b[1] + a[1] * b[0]};
      });
  const ScaleVector origin = ScaleVector::zero(f.scale);
  // |d2 f| <= 2 |a||b| and the bracket dominates 2|a||b|
  CHECK(verify_tameness(f, origin, 1.0, 2.0, 400, 23).passed);
  CHECK(check_differentials(f, origin, 1.0, 50, 24).passed);

  // rotations preserve both norms and sit at the floor
  const double c = std::cos(0.4), sn = std::sin(0.4);
  const TameMap rot = constant_scale_map(
      2,
      [c, sn](const std::vector<double>& x) {
        return std::vector<double>{c * x[0] - sn * x[1], sn * x[0] + c * x[1]};
      },
      [c, sn](const std::vector<double>&, const std::vector<double>& e) {
        return std::vector<double>{c * e[0] - sn * e[1], sn * e[0] + c * e[1]};
      },
      [](const std::vector<double>&, const std::vector<double>&,
         const std::vector<double>&) {
        return std::vector<double>{0.0, 0.0};
      });
  CHECK(estimate_kappa(rot, origin, 1.0, 100, 25) == 1e-12);
  Rng rng(26);
  const ScaleVector v(rot.scale, rng.gaussian_vector(2));
  CHECK(rot.eval(v).norm(1) == doctest::Approx(v.norm(1)).epsilon(1e-14));
}

TEST_CASE("d2 symmetry on random triples") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.35), 3, 48);
  Rng rng(27);
  const ScaleVector x = ScaleVector::basis(phi.scale, 1, 0.8);
  for (int i = 0; i < 30; ++i) {
    Rng r = rng.fork(i);
    const ScaleVector y = sample_in_ball(r, x, 0.5);
    const ScaleVector a = sample_direction(r, phi.scale);
    const ScaleVector b = sample_direction(r, phi.scale);
    CHECK((phi.d2(y, a, b) - phi.d2(y, b, a)).norm(1) <=
          1e-10 * (1.0 + a.norm(1) * b.norm(1)));
  }
}
