#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pathatlas/funcspace.hpp"
#include "pathatlas/ift.hpp"
#include "pathatlas/lift.hpp"
#include "pathatlas/report.hpp"
#include "pathatlas/tame.hpp"

namespace pathatlas {

/// One coordinate chart of the target space: a diffeomorphism from an
/// H1-ball-like domain onto a subset of the (globally H1-modeled) target,
/// with analytic differentials in both directions. boundary_margin gives
/// a (possibly conservative) lower bound on the H1-distance from a domain
/// point to the domain boundary; nonpositive outside.
struct ChartMap {
  TameMap fwd;  // psi
  TameMap inv;  // psi^{-1}
  std::function<double(const ScaleVector&)> boundary_margin;
};

/// A path constant outside [-T, T]; `at` samples it at arbitrary times
/// (consistent with the grid samples in `path`).
struct BasicPath {
  GridPath path;
  double T = 0.0;
  std::function<ScaleVector(double)> at;
};

/// Validates exact constancy on nodes with |s| >= T.
BasicPath make_basic_path(const TimeGrid& grid,
                          std::function<ScaleVector(double)> at, double T);

/// Ordered charts covering a basic path, with junction times
/// t_1 < ... < t_{k-1}.
struct ChartCollection {
  std::vector<ChartMap> charts;
  std::vector<double> times;

  int size() const { return static_cast<int>(charts.size()); }
};

/// Covering condition on nodes (each leg of the path lies in its chart
/// image) plus x(t_j) != x(t_{j+1}) for consecutive junctions.
void validate_covering(const ChartCollection& cov, const BasicPath& x);

/// Junction derivative d(psi_{j+1}^{-1} o psi_j) at the chart-j
/// representation of x(t_j).
Eigen::MatrixXd junction_derivative(const ChartCollection& cov,
                                    const BasicPath& x, int j);

/// Precompose a chart with an invertible linear map L: the new chart is
/// psi o L with domain L^{-1}(U).
ChartMap precompose_chart(const ChartMap& chart, const Eigen::MatrixXd& L);

/// Inductively precompose charts 2..k by the inverse junction
/// linearizations so every junction derivative becomes the identity.
/// Linear precomposition preserves tameness (the second derivative of a
/// linear map vanishes). Throws if a linearization is singular.
ChartCollection normalize_covering(const ChartCollection& raw,
                                   const BasicPath& x);

struct JunctionCalibration {
  ScaleVector u_plus;    // psi_j^{-1}(x(t_j))
  ScaleVector u_minus;   // psi_{j+1}^{-1}(x(t_j))
  double epsilon = 0.0;  // radius of the overlap ball around u_minus
  double kappa_hat = 0.0;
  double c_j = 0.0;      // (5/4) kappa_hat max(1, |u_minus|_2)
  double gamma_observed = 0.0;  // sup ||d(phi_j^{-1}) - Id||_{op,H1} <= 1/2
};

struct OverlapCalibration {
  std::vector<JunctionCalibration> junctions;
  double C = 0.0;  // max_j max_s c_j (1 + |psi_{j+1}^{-1}(x_s)|_2)
};

/// A calibrated local parametrization Psi of path space centered at the
/// basic path x: charts, interpolation intervals [t_minus_j, t_j] with
/// quintic smoothstep cutoffs, overlap calibration, and the domain radius
/// R of admissible |xi(s)|_1.
struct PathChart {
  BasicPath x;
  ChartCollection cov;
  std::vector<double> t_minus;
  OverlapCalibration calib;
  double R = 0.0;
};

struct CalibrationOptions {
  int n_samples = 200;
  std::uint64_t seed = 1234;
  double eps0 = 0.5;     // initial overlap-ball radius for the bisection
  int max_halvings = 14;
  double safety = 0.9;   // factor applied to the computed radius R
};

/// Calibrate every junction (overlap ball radius, near-identity margin,
/// tame constant, inequality (1) constant), then compute R as the safety-
/// scaled minimal nodewise distance-to-complement over the membership
/// conditions. The covering must be normalized.
PathChart build_path_chart(const ChartCollection& cov, const BasicPath& x,
                           std::vector<double> t_minus,
                           const CalibrationOptions& opt);

/// Cutoff beta^j(s) for junction j (1-based): 0 left of t_minus, 1 right
/// of t_j, quintic smoothstep between.
double chart_cutoff(const PathChart& chart, int j, double s);

/// Which formula applies at time s: an interpolation interval (interp
/// true, j = junction index, 1-based) or a plain chart leg (interp false,
/// j = chart index, 1-based).
struct CaseSel {
  bool interp = false;
  int j = 1;
};
CaseSel classify_time(const PathChart& chart, double s);

/// Interpolation map S_s^j of the chart at time s (valid when s lies in
/// interpolation interval j).
InterpMap interpolation_map(const PathChart& chart, int j, double s);

/// Nodewise evaluation of the local parametrization: interpolation legs
/// blend the two adjacent chart representations through S_s^j, plain legs
/// shift inside a single chart. Requires |xi(s)|_1 < R at every node.
GridPath chart_eval(const PathChart& chart, const GridPath& xi);

/// Per-node record of a transition solve: which of the four case
/// formulas applied and the solver effort (zero for the closed cases).
struct TransitionTraceRow {
  double s = 0.0;
  int case_tag = 1;  // 1 plain/plain, 2 interp/plain, 3 plain/interp, 4 both
  int newton_iterations = 0;
  double residual = 0.0;
};

void write_trace_csv(std::ostream& out,
                     const std::vector<TransitionTraceRow>& trace);

/// Solve  Psi~(eta) = Psi(xi)  nodewise for eta by the applicable case
/// formula; interpolation cases on the target side invert S~ by the
/// contraction iteration at tolerance tol.
GridPath transition_eval(const PathChart& from, const PathChart& to,
                         const GridPath& xi, double tol,
                         std::vector<TransitionTraceRow>* trace = nullptr);

/// The transition packaged as a time-dependent map family phi(s, .) with
/// analytic space differentials (chain rule through S and S^{-1});
/// the s-derivative is supplied by central differences. The asymptotic
/// horizon is the larger of the two basic-path horizons.
ParamTameMap transition_param_tame(const PathChart& from, const PathChart& to,
                                   double newton_tol = 1e-12);

/// Agreement of the case formulas across every interpolation boundary of
/// both charts, evaluated two-sided on sampled admissible vectors.
VerificationReport junction_continuity_check(const PathChart& from,
                                             const PathChart& to, int n,
                                             std::uint64_t seed,
                                             double tol = 1e-10);

struct ChartCheckOptions {
  // probe steps large enough that the quadratic term dominates the
  // per-node contraction-solver noise floor
  std::vector<double> h_list{3e-2, 1e-2, 3e-3};
  double tol = 1e-9;        // roundtrip unit: pass at 10*tol
  double min_order = 0.9;   // finite-difference convergence order
  std::uint64_t seed = 99;
};

/// (a) transition roundtrip in the triple norm, (b) C^1 finite-difference
/// probe of the transition, (c) weak-tangent transition roundtrip in the
/// product norm.
VerificationReport chart_checks(const PathChart& from, const PathChart& to,
                                const GridPath& xi, const GridPath& eta,
                                const ChartCheckOptions& opt);

}  // namespace pathatlas
