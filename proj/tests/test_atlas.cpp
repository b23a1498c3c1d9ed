#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "pathatlas/atlas.hpp"
#include "pathatlas/fixtures.hpp"
#include "pathatlas/linalg.hpp"

using namespace pathatlas;

namespace {

ChartMap identity_chart(const ScaleHandle& s, const ScaleVector& center,
                        double rho) {
  return fixtures::ball_chart(identity_map(s), identity_map(s), center, rho);
}

BasicPath constant_path(const TimeGrid& grid, const ScaleVector& p, double T) {
  return make_basic_path(grid, [p](double) { return p; }, T);
}

}  // namespace

TEST_CASE("normalize covering: identity junctions stay untouched") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(3.0, 60);
  const ScaleVector p = ScaleVector::basis(s, 0, 0.2);
  const BasicPath x = constant_path(grid, p, 1.0);
  ChartCollection cov;
  cov.charts = {identity_chart(s, p, 2.0), identity_chart(s, p, 2.0)};
  cov.times = {0.0};
  const ChartCollection norm = normalize_covering(cov, x);
  const Eigen::MatrixXd J = junction_derivative(norm, x, 1);
  CHECK((J - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-14);
  Rng rng(1);
  const ScaleVector v = sample_in_ball(rng, p, 1.0);
  CHECK((norm.charts[1].fwd.eval(v) - v).norm(1) == 0.0);
}

TEST_CASE("normalize covering removes a fixed linear twist") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(3.0, 60);
  const ScaleVector p = ScaleVector::basis(s, 0, 0.2);
  const BasicPath x = constant_path(grid, p, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  A(0, 1) = 0.4;
  A(1, 1) = 1.3;
  A(2, 0) = -0.2;
  ChartCollection cov;
  cov.charts = {identity_chart(s, p, 2.5),
                precompose_chart(identity_chart(s, p, 2.5), A)};
  cov.times = {0.0};
  CHECK(operator_norm(junction_derivative(cov, x, 1) -
                          Eigen::MatrixXd::Identity(3, 3),
                      s, 1) > 0.1);
  const ChartCollection norm = normalize_covering(cov, x);
  CHECK((junction_derivative(norm, x, 1) - Eigen::MatrixXd::Identity(3, 3))
            .norm() <= 1e-12);
}

TEST_CASE("normalize covering with a single chart returns its input") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(3.0, 60);
  const ScaleVector p = ScaleVector::basis(s, 0, 0.2);
  const BasicPath x = constant_path(grid, p, 1.0);
  ChartCollection cov;
  cov.charts = {identity_chart(s, p, 2.0)};
  const ChartCollection norm = normalize_covering(cov, x);
  CHECK(norm.size() == 1);
}

TEST_CASE("radius for unit-ball chart domains is the safety fraction") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(3.0, 60);
  const ScaleVector p = ScaleVector::basis(s, 0, 0.2);
  const BasicPath x = constant_path(grid, p, 1.0);
  ChartCollection cov;
  cov.charts = {identity_chart(s, p, 1.0)};
  CalibrationOptions opt;
  const PathChart pc = build_path_chart(cov, x, {}, opt);
  CHECK(pc.R == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(pc.R <= 0.9);
  CHECK(pc.calib.junctions.empty());
}

TEST_CASE("single-chart parametrization is a plain shift") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(3.0, 60);
  const ScaleVector p = ScaleVector::basis(s, 0, 0.2);
  const BasicPath x = constant_path(grid, p, 1.0);
  ChartCollection cov;
  cov.charts = {identity_chart(s, p, 1.5)};
  const PathChart pc = build_path_chart(cov, x, {}, CalibrationOptions{});
  Rng rng(2);
  const GridPath xi = fixtures::random_bump_path(grid, s, rng, 0.3);
  const GridPath img = chart_eval(pc, xi);
  for (int i = 0; i <= grid.M; ++i)
    CHECK((img.values[i] - (p + xi.values[i])).norm(1) == 0.0);
}

TEST_CASE("warped atlas calibration and center reproduction") {
  const TimeGrid grid = grid_make(3.0, 240);
  CalibrationOptions opt;
  opt.eps0 = 0.8;
  for (int k : {2, 3}) {
    const auto fx = fixtures::make_warped_atlas(k, 0, grid);
    const PathChart pc = fixtures::calibrated_chart(fx, opt);
    CHECK(pc.R > 0.05);
    CHECK(pc.calib.C > 0.0);
    REQUIRE(static_cast<int>(pc.calib.junctions.size()) == k - 1);
    for (const auto& jc : pc.calib.junctions) {
      CHECK(jc.gamma_observed <= 0.5);
      CHECK(jc.epsilon * jc.kappa_hat < 0.5);
      CHECK(jc.c_j == doctest::Approx(1.25 * jc.kappa_hat *
                                      std::max(1.0, jc.u_minus.norm(2))));
    }
    const GridPath img = chart_eval(pc, zero_path(grid, fx.scale));
    double worst = 0.0;
    for (int i = 0; i <= grid.M; ++i)
      worst = std::max(worst, (img.values[i] - pc.x.path.values[i]).norm(2));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("transition of a chart with itself is the identity") {
  const TimeGrid grid = grid_make(3.0, 240);
  const auto fx = fixtures::make_warped_atlas(2, 0, grid);
  CalibrationOptions opt;
  opt.eps0 = 0.8;
  const PathChart A = fixtures::calibrated_chart(fx, opt);
  Rng rng(3);
  const GridPath xi =
      fixtures::random_bump_path(grid, fx.scale, rng, 0.2 * A.R);
  const GridPath eta = transition_eval(A, A, xi, 1e-12);
  CHECK(path_norms(path_sub(eta, xi)).sup_h1 <= 1e-11);
}

TEST_CASE("translation pair: the transition is a shift, case 1 in hand form") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(3.0, 60);
  const ScaleVector p = ScaleVector::basis(s, 0, 0.2);
  const ScaleVector c = ScaleVector::basis(s, 1, 0.05);
  const BasicPath x = constant_path(grid, p, 1.0);
  const BasicPath xt = constant_path(grid, p + c, 1.0);
  ChartCollection covA, covB;
  covA.charts = {identity_chart(s, p, 1.5)};
  covB.charts = {identity_chart(s, p + c, 1.5)};
  const PathChart A = build_path_chart(covA, x, {}, CalibrationOptions{});
  const PathChart B = build_path_chart(covB, xt, {}, CalibrationOptions{});
  Rng rng(4);
  const GridPath xi = fixtures::random_bump_path(grid, s, rng, 0.2);
  const GridPath eta = transition_eval(A, B, xi, 1e-12);
  for (int i = 0; i <= grid.M; ++i)
    CHECK((eta.values[i] - (xi.values[i] - c)).norm(1) <= 1e-14);
}

TEST_CASE("all four case formulas occur and tails are frozen exactly") {
  const TimeGrid grid = grid_make(3.0, 240);
  CalibrationOptions opt;
  opt.eps0 = 0.8;
  const PathChart A =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(2, 0, grid), opt);
  const PathChart B =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(2, 1, grid), opt);
  Rng rng(5);
  const GridPath xi = fixtures::random_bump_path(
      grid, A.x.path.scale(), rng, 0.15 * std::min(A.R, B.R));
  std::vector<TransitionTraceRow> trace;
  const GridPath eta = transition_eval(A, B, xi, 1e-12, &trace);
  std::set<int> seen;
  for (const auto& row : trace) seen.insert(row.case_tag);
  CHECK(seen == std::set<int>{1, 2, 3, 4});
  // asymptotic nodes: both paths frozen at shared endpoints, so the
  // transition of the (zero-tailed) field vanishes there exactly
  for (int i = 0; i <= grid.M; ++i)
    if (std::abs(grid.nodes[i]) >= std::max(A.x.T, B.x.T) &&
        xi.values[i].norm(1) == 0.0)
      CHECK(eta.values[i].norm(1) <= 1e-14);
  std::stringstream ss;
  write_trace_csv(ss, trace);
  CHECK(ss.str().substr(0, 6) == "s,case");
}

TEST_CASE("junction continuity across case boundaries") {
  const TimeGrid grid = grid_make(3.0, 240);
  CalibrationOptions opt;
  opt.eps0 = 0.8;
  const PathChart A =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(3, 0, grid), opt);
  const PathChart B =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(3, 1, grid), opt);
  const VerificationReport rep = junction_continuity_check(A, B, 10, 6, 1e-10);
  CHECK(rep.passed);
}

TEST_CASE("full chart checks on the warped pair") {
  const TimeGrid grid = grid_make(3.0, 240);
  CalibrationOptions opt;
  opt.eps0 = 0.8;
  const PathChart A =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(2, 0, grid), opt);
  const PathChart B =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(2, 1, grid), opt);
  Rng ra(7), rb(8);
  const auto scale = A.x.path.scale();
  const GridPath xi =
      fixtures::random_bump_path(grid, scale, ra, 0.15 * std::min(A.R, B.R));
  const GridPath eta =
      fixtures::random_bump_path(grid, scale, rb, 0.1 * std::min(A.R, B.R));
  ChartCheckOptions cc;
  cc.tol = 1e-9;
  const VerificationReport rep = chart_checks(A, B, xi, eta, cc);
  CHECK(rep.passed);
  CHECK(rep.details["roundtrip_triple"].get<double>() <= 1e-8);
  CHECK(rep.details["weak_tangent_roundtrip"].get<double>() <= 1e-8);
  CHECK(rep.details["fd"]["fitted_order"].get<double>() >= 0.9);
}

TEST_CASE("radius violations carry the node index") {
  const TimeGrid grid = grid_make(3.0, 240);
  CalibrationOptions opt;
  opt.eps0 = 0.8;
  const PathChart A =
      fixtures::calibrated_chart(fixtures::make_warped_atlas(2, 0, grid), opt);
  GridPath xi = zero_path(grid, A.x.path.scale());
  xi.values[100].c[0] = 2.0 * A.R;
  xi = GridPath::make(grid, xi.values);
  try {
    chart_eval(A, xi);
    FAIL("expected DomainViolation");
  } catch (const DomainViolation& e) {
    CHECK(e.node_index == 100);
  }
}

TEST_CASE("shear charts satisfy the differential contract") {
  auto s = ScalePair::loop(2);
  const ScaleVector a = ScaleVector::basis(s, 0);
  const ScaleVector b = ScaleVector::basis(s, 3);
  const TameMap W = fixtures::shear_map(s, a, b, scalar_sine_map(0.4));
  const TameMap Winv = fixtures::shear_map_inverse(s, a, b, scalar_sine_map(0.4));
  Rng rng(40);
  const ScaleVector x(s, rng.gaussian_vector(s->modes()));
  CHECK((Winv.eval(W.eval(x)) - x).norm(2) <= 1e-14);
  CHECK(check_differentials(W, x, 0.7, 50, 41).passed);
  CHECK(check_differentials(Winv, x, 0.7, 50, 42).passed);
}

TEST_CASE("covering validation enforces the path-in-chart condition") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(3.0, 60);
  const ScaleVector p = ScaleVector::basis(s, 0, 0.2);
  const BasicPath x = constant_path(grid, p, 1.0);
  ChartCollection cov;
  // domain ball far away from the path
  cov.charts = {identity_chart(s, ScaleVector::basis(s, 0, 5.0), 1.0)};
  CHECK_THROWS_AS(validate_covering(cov, x), InvalidArgument);
}
