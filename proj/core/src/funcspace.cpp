#include "pathatlas/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace pathatlas {

TimeGrid grid_make(double L, int M) {
  PATHATLAS_REQUIRE(L > 0.0, "grid window half-width must be positive");
  PATHATLAS_REQUIRE(M >= 2, "grid needs at least 2 intervals");
  TimeGrid g;
  g.L = L;
  g.M = M;
  g.dt = 2.0 * L / M;
  g.nodes.resize(M + 1);
  for (int i = 0; i <= M; ++i) g.nodes[i] = -L + i * g.dt;
  return g;
}

GridPath GridPath::make(TimeGrid grid, std::vector<ScaleVector> values) {
  PATHATLAS_REQUIRE(static_cast<int>(values.size()) == grid.M + 1,
                    "value count must be M+1");
  const ScaleHandle& s = values.front().scale;
  for (const auto& v : values)
    PATHATLAS_REQUIRE(same_scale(v.scale, s),
                      "all path values must share one scale");
  GridPath p;
  p.grid = std::move(grid);
  p.left_limit = values.front();
  p.right_limit = values.back();
  p.values = std::move(values);
  return p;
}

const ScaleVector& GridPath::at(long i) const {
  if (i < 0) return left_limit;
  if (i >= static_cast<long>(values.size())) return right_limit;
  return values[static_cast<std::size_t>(i)];
}

bool GridPath::zero_limits(double tol) const {
  return left_limit.norm(2) <= tol && right_limit.norm(2) <= tol;
}

GridPath sample_path(const TimeGrid& grid, const ScaleHandle& scale,
                     const std::function<std::vector<double>(double)>& f) {
  std::vector<ScaleVector> vals;
  vals.reserve(grid.M + 1);
  for (double s : grid.nodes) vals.emplace_back(scale, f(s));
  return GridPath::make(grid, std::move(vals));
}

GridPath zero_path(const TimeGrid& grid, const ScaleHandle& scale) {
  return GridPath::make(grid, std::vector<ScaleVector>(
                                  grid.M + 1, ScaleVector::zero(scale)));
}

namespace {
GridPath combine(const GridPath& a, const GridPath& b, double ca, double cb) {
  PATHATLAS_REQUIRE(a.grid.same_as(b.grid), "grid mismatch");
  std::vector<ScaleVector> vals;
  vals.reserve(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    ScaleVector v = ca * a.values[i];
    axpy(cb, b.values[i], v);
    vals.push_back(std::move(v));
  }
  return GridPath::make(a.grid, std::move(vals));
}
}  // namespace

GridPath path_add(const GridPath& a, const GridPath& b) { return combine(a, b, 1.0, 1.0); }
GridPath path_sub(const GridPath& a, const GridPath& b) { return combine(a, b, 1.0, -1.0); }
GridPath path_axpy(const GridPath& a, double h, const GridPath& b) { return combine(a, b, 1.0, h); }

GridPath path_scale(double a, const GridPath& p) {
  std::vector<ScaleVector> vals;
  vals.reserve(p.values.size());
  for (const auto& v : p.values) vals.push_back(a * v);
  return GridPath::make(p.grid, std::move(vals));
}

GridPath derivative_path(const GridPath& p) {
  std::vector<ScaleVector> vals;
  vals.reserve(p.values.size());
  const double inv_dt = 1.0 / p.grid.dt;
  for (int i = 0; i < p.grid.M; ++i)
    vals.push_back(inv_dt * (p.values[i + 1] - p.values[i]));
  vals.push_back(ScaleVector::zero(p.scale()));
  return GridPath::make(p.grid, std::move(vals));
}

namespace {
// Trapezoid rule for node samples g_i over [s_0, s_j].
double trapezoid(const std::vector<double>& g, int j, double dt) {
  if (j <= 0) return 0.0;
  double s = 0.5 * (g[0] + g[j]);
  for (int i = 1; i < j; ++i) s += g[i];
  return s * dt;
}
}  // namespace

PathNorms path_norms_upto(const GridPath& p, int j) {
  PATHATLAS_REQUIRE(p.nodes() >= 2, "path needs at least 2 nodes");
  PATHATLAS_REQUIRE(j >= 0 && j < p.nodes(), "node index out of range");
  const double dt = p.grid.dt;
  std::vector<double> g1(j + 1), g2(j + 1);
  PathNorms n;
  for (int i = 0; i <= j; ++i) {
    const double a1 = p.values[i].norm(1);
    g1[i] = a1 * a1;
    const double a2 = p.values[i].norm(2);
    g2[i] = a2 * a2;
    n.sup_h1 = std::max(n.sup_h1, a1);
  }
  double dsq = 0.0;
  for (int i = 0; i < j; ++i) {
    const ScaleVector d = p.values[i + 1] - p.values[i];
    const double a = d.norm(1) / dt;
    dsq += a * a * dt;
  }
  n.l2_h1 = std::sqrt(trapezoid(g1, j, dt));
  n.l2_h2 = std::sqrt(trapezoid(g2, j, dt));
  n.deriv_l2_h1 = std::sqrt(dsq);
  n.w12 = std::sqrt(n.l2_h1 * n.l2_h1 + dsq);
  n.triple = std::sqrt(n.l2_h2 * n.l2_h2 + dsq);
  return n;
}

PathNorms path_norms(const GridPath& p) {
  return path_norms_upto(p, p.grid.M);
}

double product_norm(const GridPath& xi, const GridPath& eta) {
  const PathNorms nx = path_norms(xi);
  const PathNorms ne = path_norms(eta);
  return std::sqrt(nx.triple * nx.triple + ne.l2_h1 * ne.l2_h1);
}

namespace {
double bump(double t) {
  const double q = 1.0 - t * t;
  if (q <= 0.0) return 0.0;
  return std::exp(-1.0 / q);
}
}  // namespace

GridPath mollify(const GridPath& f, double mu) {
  const double dt = f.grid.dt;
  PATHATLAS_REQUIRE(mu >= 2.0 * dt, "mollifier width below grid resolution");
  const long J = static_cast<long>(std::floor(mu / dt));
  std::vector<double> w(2 * J + 1);
  double mass = 0.0;
  for (long j = -J; j <= J; ++j) {
    w[j + J] = bump(static_cast<double>(j) * dt / mu);
    mass += w[j + J];
  }
  for (auto& x : w) x /= mass;  // discrete unit mass

  const ScaleHandle& scale = f.scale();
  std::vector<ScaleVector> vals;
  vals.reserve(f.values.size());
  for (long i = 0; i < static_cast<long>(f.values.size()); ++i) {
    ScaleVector acc = ScaleVector::zero(scale);
    for (long j = -J; j <= J; ++j) axpy(w[j + J], f.at(i - j), acc);
    vals.push_back(std::move(acc));
  }
  return GridPath::make(f.grid, std::move(vals));
}

ScaleVector bochner_integral(const std::vector<IntervalStep>& steps, double a,
                             double b) {
  PATHATLAS_REQUIRE(a < b, "integration bounds must satisfy a < b");
  PATHATLAS_REQUIRE(!steps.empty(), "step list must be nonempty");
  ScaleVector acc = ScaleVector::zero(steps.front().value.scale);
  for (const auto& st : steps) {
    PATHATLAS_REQUIRE(st.a < st.b, "interval step needs a < b");
    const double len = std::max(0.0, std::min(st.b, b) - std::max(st.a, a));
    if (len > 0.0) axpy(len, st.value, acc);
  }
  return acc;
}

double integral_of_norm(const std::vector<IntervalStep>& steps, double a,
                        double b, int level) {
  // Disjointness keeps |f(t)| a plain sum of the step norms.
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (std::size_t j = i + 1; j < steps.size(); ++j) {
      const bool disjoint =
          steps[i].b <= steps[j].a || steps[j].b <= steps[i].a;
      PATHATLAS_REQUIRE(disjoint, "integral_of_norm needs disjoint intervals");
    }
  double s = 0.0;
  for (const auto& st : steps) {
    const double len = std::max(0.0, std::min(st.b, b) - std::max(st.a, a));
    s += len * st.value.norm(level);
  }
  return s;
}

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double plateau_cutoff(double t) {
  const double a = std::abs(t);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return 1.0 - smoothstep(a - 1.0);
}

GridPath approx_c1_compact(const GridPath& f, double mu, int k) {
  PATHATLAS_REQUIRE(k >= 1, "cutoff scale k must be positive");
  PATHATLAS_REQUIRE(2.0 * k <= f.grid.L, "cutoff support exceeds the window");
  GridPath g = mollify(f, mu);
  for (int i = 0; i <= f.grid.M; ++i)
    g.values[i] *= plateau_cutoff(f.grid.nodes[i] / k);
  g.left_limit = g.values.front();
  g.right_limit = g.values.back();
  return g;
}

void write_csv(std::ostream& out, const GridPath& p) {
  out << "s";
  for (int k = 0; k < p.scale()->modes(); ++k) out << ",coeff_" << k;
  out << "\n";
  out.precision(17);
  for (int i = 0; i <= p.grid.M; ++i) {
    out << p.grid.nodes[i];
    for (double c : p.values[i].c) out << "," << c;
    out << "\n";
  }
}

GridPath read_csv(std::istream& in, const ScaleHandle& scale) {
  std::string line;
  PATHATLAS_REQUIRE(static_cast<bool>(std::getline(in, line)), "empty CSV");
  std::vector<double> s_values;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    PATHATLAS_REQUIRE(static_cast<int>(row.size()) == scale->modes() + 1,
                      "CSV column count does not match scale");
    s_values.push_back(row.front());
    rows.emplace_back(row.begin() + 1, row.end());
  }
  PATHATLAS_REQUIRE(rows.size() >= 3, "CSV needs at least 3 nodes");
  const int M = static_cast<int>(rows.size()) - 1;
  const double L = -s_values.front();
  TimeGrid grid = grid_make(L, M);
  std::vector<ScaleVector> vals;
  vals.reserve(rows.size());
  for (auto& r : rows) vals.emplace_back(scale, std::move(r));
  return GridPath::make(std::move(grid), std::move(vals));
}

}  // namespace pathatlas
