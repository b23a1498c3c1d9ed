#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathatlas/scales.hpp"

namespace pathatlas {

/// Uniform time grid on the window [-L, L] with M intervals,
/// nodes s_i = -L + i*dt, dt = 2L/M.
struct TimeGrid {
  double L = 0.0;
  int M = 0;
  double dt = 0.0;
  std::vector<double> nodes;

  bool same_as(const TimeGrid& o) const { return L == o.L && M == o.M; }
};

TimeGrid grid_make(double L, int M);

/// A time-discretized path R -> H sampled on a TimeGrid, with constant
/// extension outside the window given by left_limit/right_limit.
/// Invariants: values.size() == M+1, values.front() == left_limit,
/// values.back() == right_limit, all values share one ScalePair.
struct GridPath {
  TimeGrid grid;
  std::vector<ScaleVector> values;
  ScaleVector left_limit, right_limit;

  static GridPath make(TimeGrid grid, std::vector<ScaleVector> values);

  const ScaleHandle& scale() const { return values.front().scale; }
  int nodes() const { return static_cast<int>(values.size()); }

  /// Value at node index i, with constant extension for i < 0 or i > M.
  const ScaleVector& at(long i) const;

  bool zero_limits(double tol = 0.0) const;
};

/// Sample f on the grid; the limits are the endpoint samples.
GridPath sample_path(const TimeGrid& grid, const ScaleHandle& scale,
                     const std::function<std::vector<double>(double)>& f);

GridPath zero_path(const TimeGrid& grid, const ScaleHandle& scale);

GridPath path_add(const GridPath& a, const GridPath& b);
GridPath path_sub(const GridPath& a, const GridPath& b);
GridPath path_scale(double a, const GridPath& p);
/// a + h*b
GridPath path_axpy(const GridPath& a, double h, const GridPath& b);

/// Forward-difference derivative: value[i] = (x_{i+1}-x_i)/dt for i < M,
/// value[M] = 0; limits are zero (the extension is constant).
GridPath derivative_path(const GridPath& p);

struct PathNorms {
  double l2_h1 = 0.0;       // L^2(R,H1), trapezoid over the window
  double l2_h2 = 0.0;       // L^2(R,H2)
  double deriv_l2_h1 = 0.0; // L^2(R,H1) of the forward-difference derivative
  double w12 = 0.0;         // sqrt(l2_h1^2 + deriv_l2_h1^2)
  double triple = 0.0;      // sqrt(l2_h2^2 + deriv_l2_h1^2)
  double sup_h1 = 0.0;      // max over nodes of |x_i|_1
};

/// All norms of a path. With zero limits these are the norms over R;
/// otherwise they are the windowed quantities (plus the sup over nodes).
PathNorms path_norms(const GridPath& p);

/// Same quantities restricted to nodes 0..j (window [s_0, s_j]); feeds the
/// one-sided sup estimate where the path enters the window at its limit.
PathNorms path_norms_upto(const GridPath& p, int j);

/// Product norm on pairs (xi, eta): triple norm of the base direction and
/// plain L^2_H1 of the fiber direction.
double product_norm(const GridPath& xi, const GridPath& eta);

/// Convolve with the compactly supported bump kernel
/// rho(t) = c*exp(-1/(1-t^2)) on (-1,1), scaled to width mu and
/// renormalized so the discrete mass is exactly 1. Requires mu >= 2*dt.
GridPath mollify(const GridPath& f, double mu);

/// One interval step of a really simple function: value on (a,b).
struct IntervalStep {
  double a = 0.0, b = 0.0;
  ScaleVector value;
};

/// Integral of a sum of interval steps over (a,b):
/// sum_k length(I_k intersect (a,b)) * x_k.
ScaleVector bochner_integral(const std::vector<IntervalStep>& steps, double a,
                             double b);

/// Integral of the norm |f(t)|_level over (a,b) for steps with pairwise
/// disjoint intervals (checked); the right side of the norm inequality.
double integral_of_norm(const std::vector<IntervalStep>& steps, double a,
                        double b, int level);

/// C^2 plateau cutoff: 1 on [-1,1], 0 outside (-2,2), quintic smoothstep
/// shoulders.
double plateau_cutoff(double t);
/// Monotone C^2 step: 0 for u<=0, 1 for u>=1, 6u^5-15u^4+10u^3 between.
double smoothstep(double u);

/// phi_k * (f conv rho_mu) with phi_k(t) = plateau_cutoff(t/k): a compactly
/// supported C^1-type approximation of f. Requires 2k <= L and the mollify
/// precondition.
GridPath approx_c1_compact(const GridPath& f, double mu, int k);

/// CSV with one row per node: s, coeff_0..coeff_{n-1}.
void write_csv(std::ostream& out, const GridPath& p);
GridPath read_csv(std::istream& in, const ScaleHandle& scale);

}  // namespace pathatlas
