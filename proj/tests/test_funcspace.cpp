#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pathatlas/fixtures.hpp"
#include "pathatlas/funcspace.hpp"
#include "pathatlas/rng.hpp"

using namespace pathatlas;

namespace {

// independent quadrature oracle: trapezoid for node samples, rectangle
// for forward differences, written against raw arrays
struct NormOracle {
  double l2_h1, l2_h2, deriv, sup;
};
NormOracle quadrature_oracle(const GridPath& p) {
  NormOracle o{0, 0, 0, 0};
  const double dt = p.grid.dt;
  const int M = p.grid.M;
  double a1 = 0, a2 = 0;
  for (int i = 0; i <= M; ++i) {
    const double w = (i == 0 || i == M) ? 0.5 : 1.0;
    const double n1 = p.values[i].norm(1), n2 = p.values[i].norm(2);
    a1 += w * n1 * n1 * dt;
    a2 += w * n2 * n2 * dt;
    o.sup = std::max(o.sup, n1);
  }
  double d = 0;
  for (int i = 0; i < M; ++i) {
    const double n = (p.values[i + 1] - p.values[i]).norm(1) / dt;
    d += n * n * dt;
  }
  o.l2_h1 = std::sqrt(a1);
  o.l2_h2 = std::sqrt(a2);
  o.deriv = std::sqrt(d);
  return o;
}

}  // namespace

TEST_CASE("grid_make basics") {
  const TimeGrid g = grid_make(1.0, 2);
  CHECK(g.nodes == std::vector<double>{-1.0, 0.0, 1.0});
  const TimeGrid g2 = grid_make(10.0, 2000);
  CHECK(g2.dt == doctest::Approx(0.01).epsilon(1e-15));
  for (int i = 0; i < g2.M; ++i)
    CHECK(g2.nodes[i + 1] - g2.nodes[i] == doctest::Approx(g2.dt).epsilon(1e-12));
  CHECK_THROWS_AS(grid_make(-1.0, 10), InvalidArgument);
  CHECK_THROWS_AS(grid_make(1.0, 1), InvalidArgument);
}

TEST_CASE("zero path has zero norms") {
  auto s = ScalePair::loop(2);
  const GridPath z = zero_path(grid_make(5.0, 100), s);
  const PathNorms n = path_norms(z);
  CHECK(n.l2_h1 == 0.0);
  CHECK(n.l2_h2 == 0.0);
  CHECK(n.deriv_l2_h1 == 0.0);
  CHECK(n.w12 == 0.0);
  CHECK(n.triple == 0.0);
  CHECK(n.sup_h1 == 0.0);
}

TEST_CASE("exponential path hits the closed-form W12 norm") {
  auto s = ScalePair::constant(1);
  const GridPath v = sample_path(grid_make(12.0, 4000), s, [](double t) {
    return std::vector<double>{std::exp(-std::abs(t))};
  });
  const PathNorms n = path_norms(v);
  // both integrals of the closed form are 1, so w12 = sqrt(2)
  CHECK(std::abs(n.w12 - std::sqrt(2.0)) <= 1e-3);
  CHECK(n.sup_h1 == 1.0);  // attained exactly at the node s = 0
}

TEST_CASE("path norms agree with the quadrature oracle and obey the embedding") {
  auto s = ScalePair::loop(3);
  const TimeGrid grid = grid_make(8.0, 700);
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const GridPath p = fixtures::random_bump_path(grid, s, rng, 1.0 + i * 0.3);
    const PathNorms n = path_norms(p);
    const NormOracle o = quadrature_oracle(p);
    CHECK(n.l2_h1 == doctest::Approx(o.l2_h1).epsilon(1e-12));
    CHECK(n.l2_h2 == doctest::Approx(o.l2_h2).epsilon(1e-12));
    CHECK(n.deriv_l2_h1 == doctest::Approx(o.deriv).epsilon(1e-12));
    CHECK(n.sup_h1 == doctest::Approx(o.sup).epsilon(1e-14));
    CHECK(n.triple >= n.w12);
    CHECK(n.sup_h1 <= n.w12 * (1.0 + 1e-3));
  }
}

TEST_CASE("one-sided sup bound over prefix windows") {
  auto s = ScalePair::loop(2);
  const TimeGrid grid = grid_make(6.0, 500);
  Rng rng(9);
  const GridPath p = fixtures::random_bump_path(grid, s, rng, 2.0);
  for (int j : {50, 125, 250, 400, 500}) {
    const PathNorms n = path_norms_upto(p, j);
    CHECK(n.sup_h1 <= n.w12 * (1.0 + 1e-3));
  }
}

TEST_CASE("mollifier preserves constants") {
  auto s = ScalePair::constant(1);
  const GridPath c = sample_path(grid_make(5.0, 500), s,
                                 [](double) { return std::vector<double>{1.7}; });
  const GridPath m = mollify(c, 0.3);
  for (const auto& v : m.values) CHECK(v.c[0] == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("mollifier converges at second order on the Gaussian") {
  auto s = ScalePair::constant(1);
  const TimeGrid grid = grid_make(10.0, 2000);
  const GridPath f = sample_path(grid, s, [](double t) {
    return std::vector<double>{std::exp(-t * t)};
  });
  // independent error oracle: raw trapezoid of the squared difference
  auto l2_err = [&](double mu) {
    const GridPath g = mollify(f, mu);
    double acc = 0.0;
    for (int i = 0; i <= grid.M; ++i) {
      const double w = (i == 0 || i == grid.M) ? 0.5 : 1.0;
      const double d = g.values[i].c[0] - f.values[i].c[0];
      acc += w * d * d * grid.dt;
    }
    return std::sqrt(acc);
  };
  for (double mu : {0.8, 0.4, 0.2}) {
    const double ratio = l2_err(mu / 2) / l2_err(mu);
    CHECK(ratio >= 0.2);
    CHECK(ratio <= 0.35);
  }
}

TEST_CASE("discrete derivative commutes with convolution") {
  auto s = ScalePair::loop(2);
  const TimeGrid grid = grid_make(10.0, 1500);
  Rng rng(17);
  const GridPath f = fixtures::random_bump_path(grid, s, rng, 1.0);
  const GridPath lhs = derivative_path(mollify(f, 0.4));
  const GridPath rhs = mollify(derivative_path(f), 0.4);
  const double err = path_norms(path_sub(lhs, rhs)).l2_h1;
  CHECK(err <= 1e-8 * path_norms(f).w12);
}

TEST_CASE("convolution does not increase the L2 norm") {
  auto s = ScalePair::constant(2);
  const TimeGrid grid = grid_make(7.0, 900);
  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    const GridPath f = fixtures::random_bump_path(grid, s, rng, 1.0);
    for (int level : {1, 2}) {
      PathNorms nf = path_norms(f), ng = path_norms(mollify(f, 0.25));
      const double a = level == 1 ? ng.l2_h1 : ng.l2_h2;
      const double b = level == 1 ? nf.l2_h1 : nf.l2_h2;
      CHECK(a <= b * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("mollifier width below grid resolution is rejected") {
  auto s = ScalePair::constant(1);
  const GridPath f = zero_path(grid_make(5.0, 100), s);  // dt = 0.1
  CHECK_THROWS_AS(mollify(f, 0.15), InvalidArgument);
}

TEST_CASE("bochner integral of a characteristic step") {
  auto s = ScalePair::loop(1);
  const ScaleVector x(s, {0.3, -1.2, 0.5});
  const ScaleVector got = bochner_integral({{0.0, 1.0, x}}, 0.0, 1.0);
  CHECK((got - x).norm(2) <= 1e-15);
}

TEST_CASE("bochner cancellation versus the norm integral") {
  auto s = ScalePair::loop(1);
  const ScaleVector x = ScaleVector::basis(s, 0, 2.0);
  const std::vector<IntervalStep> steps{{0.0, 1.0, x}, {1.0, 2.0, -1.0 * x}};
  CHECK(bochner_integral(steps, 0.0, 2.0).norm(2) == 0.0);
  CHECK(integral_of_norm(steps, 0.0, 2.0, 2) ==
        doctest::Approx(2.0 * x.norm(2)).epsilon(1e-15));
}

TEST_CASE("bochner integral agrees with an exact partition oracle") {
  auto s = ScalePair::loop(2);
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<IntervalStep> steps;
    for (int k = 0; k < 10; ++k) {
      IntervalStep st;
      st.a = rng.uniform(-4.0, 4.0);
      st.b = st.a + rng.uniform(0.1, 2.0);
      st.value = ScaleVector(s, rng.gaussian_vector(s->modes()));
      steps.push_back(std::move(st));
    }
    const double a = -3.0, b = 3.5;
    // oracle: split (a,b) at every step endpoint; each piece carries the
    // exact sum of the active step values
    std::vector<double> cuts{a, b};
    for (const auto& st : steps) {
      if (st.a > a && st.a < b) cuts.push_back(st.a);
      if (st.b > a && st.b < b) cuts.push_back(st.b);
    }
    std::sort(cuts.begin(), cuts.end());
    ScaleVector expect = ScaleVector::zero(s);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
      for (const auto& st : steps)
        if (mid > st.a && mid < st.b)
          axpy(cuts[i + 1] - cuts[i], st.value, expect);
    }
    const ScaleVector got = bochner_integral(steps, a, b);
    CHECK((got - expect).norm(2) <= 1e-12 * (1.0 + expect.norm(2)));
  }
}

TEST_CASE("compactly supported approximation improves under refinement") {
  auto s = ScalePair::constant(1);
  const TimeGrid grid = grid_make(20.0, 4000);
  const GridPath f = sample_path(grid, s, [](double t) {
    return std::vector<double>{std::exp(-std::abs(t))};
  });
  auto w12_err = [&](int k, double mu) {
    return path_norms(path_sub(approx_c1_compact(f, mu, k), f)).w12;
  };
  CHECK(w12_err(4, 0.08) > w12_err(8, 0.04));

  // a path already supported inside [-k,k]: the cutoff is the identity
  // there and only the mollification error remains
  const GridPath g = sample_path(grid, s, [](double t) {
    return std::vector<double>{std::exp(-t * t)};
  });
  CHECK(path_norms(path_sub(approx_c1_compact(g, 0.02, 8), g)).w12 <= 2e-2);
}

TEST_CASE("CSV round trip preserves paths") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(2.0, 10);
  Rng rng(41);
  const GridPath p = fixtures::random_bump_path(grid, s, rng, 1.0);
  std::stringstream ss;
  write_csv(ss, p);
  const GridPath q = read_csv(ss, s);
  REQUIRE(q.grid.M == p.grid.M);
  for (int i = 0; i <= p.grid.M; ++i)
    CHECK((q.values[i] - p.values[i]).norm(2) <= 1e-14);
}

TEST_CASE("mollification is linear") {
  auto s = ScalePair::loop(1);
  const TimeGrid grid = grid_make(6.0, 600);
  Rng rng(47);
  const GridPath f = fixtures::random_bump_path(grid, s, rng, 1.0);
  const GridPath g = fixtures::random_bump_path(grid, s, rng, 0.8);
  const GridPath lhs = mollify(path_axpy(f, -2.3, g), 0.3);
  const GridPath rhs = path_axpy(mollify(f, 0.3), -2.3, mollify(g, 0.3));
  CHECK(path_norms(path_sub(lhs, rhs)).w12 <= 1e-13);
}
