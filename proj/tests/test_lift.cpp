#include <doctest.h>

#include <cmath>

#include "pathatlas/fixtures.hpp"
#include "pathatlas/lift.hpp"

using namespace pathatlas;

TEST_CASE("zero path maps to zero under an origin-fixing lift") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 3, 48);
  const TimeGrid grid = grid_make(5.0, 200);
  const LiftedMap Phi = make_lifted(phi, grid);
  const GridPath z = zero_path(grid, phi.scale);
  CHECK(path_norms(lift_eval(Phi, z)).triple == 0.0);
}

TEST_CASE("lift is nodewise application") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 3, 48);
  const TimeGrid grid = grid_make(4.0, 120);
  const LiftedMap Phi = make_lifted(phi, grid);
  Rng rng(1);
  const GridPath xi = fixtures::random_bump_path(grid, phi.scale, rng, 0.7);
  const GridPath out = lift_eval(Phi, xi);
  for (int i : {0, 17, 60, 120})
    CHECK((out.values[i] - phi.eval(xi.values[i])).norm(2) == 0.0);
}

TEST_CASE("identity lift returns its arguments") {
  auto s = ScalePair::loop(2);
  const TimeGrid grid = grid_make(4.0, 100);
  const LiftedMap Phi = make_lifted(identity_map(s), grid);
  Rng rng(2);
  const GridPath xi = fixtures::random_bump_path(grid, s, rng, 1.0);
  const GridPath eta = fixtures::random_bump_path(grid, s, rng, 0.5);
  const auto [a, b] = weak_tangent(Phi, xi, eta);
  CHECK(path_norms(path_sub(a, xi)).triple == 0.0);
  CHECK(path_norms(path_sub(b, eta)).triple == 0.0);
  CHECK(path_norms(lift_d(Phi, xi, zero_path(grid, s))).triple == 0.0);
}

TEST_CASE("linear lifts have vanishing finite-difference residuals") {
  auto s = ScalePair::loop(2);
  std::vector<double> d(s->modes(), 0.9);
  const LiftedMap Phi = make_lifted(diagonal_map(s, d), grid_make(4.0, 100));
  Rng rng(3);
  const GridPath xi = fixtures::random_bump_path(Phi.grid, s, rng, 1.0);
  const GridPath eta = fixtures::random_bump_path(Phi.grid, s, rng, 0.6);
  const VerificationReport rep = c1_fd_check(Phi, xi, eta, {1e-2, 1e-3, 1e-4});
  CHECK(rep.passed);
  CHECK(rep.details["fitted_order"].get<double>() == 99.0);
}

TEST_CASE("quadratic scalar lift has an exactly linear normalized residual") {
  // phi(u) = u^2: Phi(xi + h eta) - Phi(xi) - 2 h xi eta = h^2 eta^2
  const TameMap sq = fixtures::scalar_tame(
      {[](double u) { return u * u; }, [](double u) { return 2.0 * u; },
       [](double) { return 2.0; }, [](double) { return 0.0; },
       [](double) { return 0.0; }});
  const TimeGrid grid = grid_make(5.0, 400);
  const LiftedMap Phi = make_lifted(sq, grid);
  Rng rng(4);
  const GridPath xi = fixtures::random_bump_path(grid, sq.scale, rng, 0.8);
  const GridPath eta = fixtures::random_bump_path(grid, sq.scale, rng, 0.5);
  const std::vector<double> h_list{1e-1, 1e-2, 1e-3};
  const VerificationReport rep = c1_fd_check(Phi, xi, eta, h_list);
  CHECK(rep.passed);
  const double order = rep.details["fitted_order"].get<double>();
  CHECK(std::abs(order - 1.0) <= 0.02);
  // residual/h = h * |||eta^2|||-type quantity: check the exact remainder
  GridPath eta_sq = eta;
  for (auto& v : eta_sq.values) v.c[0] *= v.c[0];
  eta_sq = GridPath::make(grid, eta_sq.values);
  const double expect = path_norms(eta_sq).triple;
  const double got =
      rep.details["series"][0]["residual"].get<double>() / h_list[0];
  CHECK(got == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("loop transition lift converges with order at least 0.9") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 6, 64);
  const TimeGrid grid = grid_make(10.0, 500);
  const LiftedMap Phi = make_lifted(phi, grid);
  Rng rng(5);
  const GridPath xi = fixtures::random_bump_path(grid, phi.scale, rng, 0.8);
  const GridPath eta = fixtures::random_bump_path(grid, phi.scale, rng, 0.5);
  const VerificationReport rep = c1_fd_check(Phi, xi, eta, {1e-2, 1e-3, 1e-4});
  CHECK(rep.passed);
  CHECK(rep.details["fitted_order"].get<double>() >= 0.9);
  CHECK(rep.details["series"].back()["central_diff_error"].get<double>() <= 1e-5);
}

TEST_CASE("weak tangent map passes the product-norm probe") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 4, 64);
  const TimeGrid grid = grid_make(8.0, 400);
  const LiftedMap Phi = make_lifted(phi, grid);
  Rng rng(6);
  const GridPath xi = fixtures::random_bump_path(grid, phi.scale, rng, 0.8);
  const GridPath eta = fixtures::random_bump_path(grid, phi.scale, rng, 0.6);
  const GridPath xh = fixtures::random_bump_path(grid, phi.scale, rng, 0.4);
  const GridPath eh = fixtures::random_bump_path(grid, phi.scale, rng, 0.4);
  const VerificationReport rep =
      tphi_fd_check(Phi, xi, eta, xh, eh, {1e-2, 1e-3, 1e-4});
  CHECK(rep.passed);
}

TEST_CASE("domain violations carry the node index") {
  auto s = ScalePair::constant(1);
  TameMap phi = identity_map(s);
  phi.domain = [](const ScaleVector& x) { return std::abs(x.c[0]) < 0.5; };
  const TimeGrid grid = grid_make(2.0, 10);
  const LiftedMap Phi = make_lifted(phi, grid);
  GridPath xi = zero_path(grid, s);
  xi.values[7].c[0] = 0.9;
  xi = GridPath::make(grid, xi.values);
  try {
    lift_eval(Phi, xi);
    FAIL("expected DomainViolation");
  } catch (const DomainViolation& e) {
    CHECK(e.node_index == 7);
  }
}

TEST_CASE("unparametrized lifts require an origin-fixing map") {
  auto s = ScalePair::constant(1);
  const ScaleVector c = ScaleVector::basis(s, 0, 1.0);
  CHECK_THROWS_AS(make_lifted(translation_map(c), grid_make(2.0, 10)),
                  InvalidArgument);
}

TEST_CASE("constant families agree with the plain lift") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 3, 48);
  const TimeGrid grid = grid_make(5.0, 200);
  const ParamLiftedMap P = make_param_lifted(param_from_tame(phi, 1.0), grid);
  const LiftedMap Phi = make_lifted(phi, grid);
  Rng rng(8);
  const GridPath xi = fixtures::random_bump_path(grid, phi.scale, rng, 0.7);
  CHECK(path_norms(path_sub(param_lift_eval(P, xi), lift_eval(Phi, xi))).triple ==
        0.0);
  const GridPath eta = fixtures::random_bump_path(grid, phi.scale, rng, 0.5);
  CHECK(path_norms(path_sub(param_lift_d(P, xi, eta), lift_d(Phi, xi, eta)))
            .triple == 0.0);
}

TEST_CASE("translation family: the s-derivative term is the cutoff slope") {
  auto s = ScalePair::constant(1);
  const ScaleVector c = ScaleVector::basis(s, 0, 1.0);
  ParamTameMap fam;
  fam.scale = s;
  fam.horizon = 2.5;
  auto beta = [](double t) { return smoothstep((t + 2.0) / 4.0); };
  fam.eval = [beta, c](double t, const ScaleVector& x) {
    ScaleVector y = x;
    axpy(beta(t), c, y);
    return y;
  };
  fam.d1 = [](double, const ScaleVector&, const ScaleVector& e) { return e; };
  fam.d2 = [s](double, const ScaleVector&, const ScaleVector&,
               const ScaleVector&) { return ScaleVector::zero(s); };
  fam.s_dot = [beta, c, s](double t, const ScaleVector&) {
    const double u = (t + 2.0) / 4.0;
    const double db = (u <= 0.0 || u >= 1.0)
                          ? 0.0
                          : (30 * u * u * u * u - 60 * u * u * u + 30 * u * u) / 4.0;
    ScaleVector y = ScaleVector::zero(s);
    axpy(db, c, y);
    return y;
  };
  fam.domain = [](double, const ScaleVector&) { return true; };
  const TimeGrid grid = grid_make(8.0, 8000);
  const ParamLiftedMap P = make_param_lifted(fam, grid);
  const VerificationReport rep =
      param_time_derivative_check(P, zero_path(grid, s), 1e-6);
  CHECK(rep.passed);

  // frozen outside the horizon: the output is constant on the tails
  const GridPath out = param_lift_eval(P, zero_path(grid, s));
  for (int i = 0; i <= grid.M; ++i) {
    if (grid.nodes[i] <= -2.0) CHECK(out.values[i].c[0] == 0.0);
    if (grid.nodes[i] >= 2.0) CHECK(out.values[i].c[0] == 1.0);
  }
}

TEST_CASE("lift derivative is linear in the direction") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 3, 48);
  const TimeGrid grid = grid_make(5.0, 200);
  const LiftedMap Phi = make_lifted(phi, grid);
  Rng rng(9);
  const GridPath xi = fixtures::random_bump_path(grid, phi.scale, rng, 0.7);
  const GridPath a = fixtures::random_bump_path(grid, phi.scale, rng, 0.6);
  const GridPath b = fixtures::random_bump_path(grid, phi.scale, rng, 0.9);
  const GridPath lhs = lift_d(Phi, xi, path_axpy(a, -1.7, b));
  const GridPath rhs = path_axpy(lift_d(Phi, xi, a), -1.7, lift_d(Phi, xi, b));
  CHECK(path_norms(path_sub(lhs, rhs)).triple <= 1e-12);
}

TEST_CASE("lifts commute with grid refinement on shared nodes") {
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 2, 32);
  const TimeGrid coarse = grid_make(4.0, 80);
  const TimeGrid fine = grid_make(4.0, 160);
  Rng rng(10);
  // sample one analytic field on both grids
  std::vector<double> amp = rng.gaussian_vector(phi.scale->modes());
  auto field = [&](double s) {
    std::vector<double> c(amp.size());
    const double cut = plateau_cutoff(2.4 * s / 4.0);
    for (std::size_t d = 0; d < c.size(); ++d)
      c[d] = amp[d] * std::sin(0.9 * s + 0.2 * d) * cut;
    return c;
  };
  const GridPath xc = sample_path(coarse, phi.scale, field);
  const GridPath xf = sample_path(fine, phi.scale, field);
  const GridPath oc = lift_eval(make_lifted(phi, coarse), xc);
  const GridPath of = lift_eval(make_lifted(phi, fine), xf);
  for (int i = 0; i <= coarse.M; ++i)
    CHECK((oc.values[i] - of.values[2 * i]).norm(2) == 0.0);
}

TEST_CASE("lifted derivative obeys the two-level bound pattern") {
  // fit the pointwise first-derivative constant kappa along the tube of
  // path values, then the lifted derivative satisfies
  //   |dPhi eta|_{L2H2}^2 <= 2 kappa^2 (1 + 2 |xi|_{L2H2}^2) |||eta|||^2
  const TameMap phi = loop_transition_map(scalar_sine_map(0.3), 4, 64);
  const TimeGrid grid = grid_make(8.0, 400);
  const LiftedMap Phi = make_lifted(phi, grid);
  Rng rng(30);
  const GridPath xi = fixtures::random_bump_path(grid, phi.scale, rng, 0.9);
  double kappa = 0.0;
  for (int i = 0; i <= grid.M; ++i) {
    Rng r = rng.fork(i);
    for (int t = 0; t < 3; ++t) {
      const ScaleVector e = sample_direction(r, phi.scale);
      kappa = std::max(kappa,
                       phi.d1(xi.values[i], e).norm(2) /
                           (e.norm(2) + xi.values[i].norm(2) * e.norm(1)));
    }
  }
  const double nxi2 = path_norms(xi).l2_h2;
  for (int t = 0; t < 10; ++t) {
    Rng r = rng.fork(1000 + t);
    const GridPath eta = fixtures::random_bump_path(grid, phi.scale, r, 0.7);
    const double lhs = std::pow(path_norms(lift_d(Phi, xi, eta)).l2_h2, 2);
    const double rhs = 2.0 * kappa * kappa * (1.0 + 2.0 * nxi2 * nxi2) *
                       std::pow(path_norms(eta).triple, 2);
    CHECK(lhs <= rhs * (1.0 + 1e-9));
  }
}
