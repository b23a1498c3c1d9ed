#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "pathatlas/funcspace.hpp"
#include "pathatlas/lift.hpp"
#include "pathatlas/report.hpp"

namespace pathatlas {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A finite-dimensional manifold with closed-form exponential map and
/// inverse, given in ambient coordinates. d_exp/d_log are the
/// differentials in the tangent argument.
struct FinDimManifold {
  int dim = 0;      // intrinsic dimension
  int ambient = 0;  // ambient coordinate count
  std::function<Vec(const Vec& q, const Vec& v)> exp;
  std::function<Vec(const Vec& q, const Vec& p)> log;
  std::function<Vec(const Vec& q, const Vec& v, const Vec& w)> d_exp;
  std::function<Vec(const Vec& q, const Vec& p, const Vec& w)> d_log;
  std::function<double(const Vec& q)> inj_radius;
  std::function<double(const Vec& q, const Vec& v)> tangent_norm;
  std::function<Vec(const Vec& q, const Vec& v)> project_tangent;
  std::function<Mat(const Vec& q)> tangent_basis;  // ambient x dim, columns
  std::function<bool(const Vec& q)> on_manifold;
};

/// Flat R^n: exp(q,v) = q+v, log(q,p) = p-q.
FinDimManifold flat_geometry(int n);

/// The round unit sphere in R^3 with great-circle exponential map;
/// injectivity radius pi.
FinDimManifold sphere_geometry();

/// R^2 with the metric pulled back under F(z) = z + alpha*sin(z) (complex
/// notation); dF is a rotation-scaling, so the metric is conformally flat.
/// Valid on the strip |Im z| <= 1 where F is a diffeomorphism.
FinDimManifold conformal_flat_geometry(double alpha = 0.1);

/// A basic path on a manifold: frozen outside [-T, T], sampled on a grid,
/// with an analytic sampler.
struct ManifoldPath {
  TimeGrid grid;
  std::vector<Vec> points;
  double T = 0.0;
  std::function<Vec(double)> at;
};

ManifoldPath make_manifold_path(const FinDimManifold& M, const TimeGrid& grid,
                                std::function<Vec(double)> at, double T);

/// Frames T_s : T_{x(s)}M -> R^dim per node (rows orthonormal in ambient
/// coordinates), built by discrete parallel transport with a Gram-Schmidt
/// correction per step; frozen outside the horizon along with the path.
struct BasicTrivialization {
  std::vector<Mat> frames;  // dim x ambient per node
  double T = 0.0;

  Vec to_coords(int node, const Vec& tangent) const;
  Vec to_tangent(int node, const Vec& coords) const;
};

BasicTrivialization parallel_frames(const FinDimManifold& M,
                                    const ManifoldPath& x);

/// s -> exp_{x(s)} xi(s); xi is a coordinate field through the
/// trivialization frame. Errors if |xi(s)|_g reaches the injectivity
/// radius at some node.
ManifoldPath exp_chart_eval(const FinDimManifold& M, const ManifoldPath& x,
                            const BasicTrivialization& Tx, const GridPath& xi);

/// Trivialized transition eta(s) = T^y_s log_{y(s)} exp_{x(s)} (T^x_s)^{-1}
/// xi(s). The two sides may carry different geometries over the same
/// point set (metric-independence cross-check).
GridPath exp_transition(const FinDimManifold& Mx, const ManifoldPath& x,
                        const BasicTrivialization& Tx,
                        const FinDimManifold& My, const ManifoldPath& y,
                        const BasicTrivialization& Ty, const GridPath& xi);

/// The transition as a nodewise map family phi(s, v) with analytic
/// v-differential; defined at grid nodes (s snaps to the nearest node).
ParamTameMap trivialized_transition(const FinDimManifold& Mx,
                                    const ManifoldPath& x,
                                    const BasicTrivialization& Tx,
                                    const FinDimManifold& My,
                                    const ManifoldPath& y,
                                    const BasicTrivialization& Ty);

struct ModelCheckOptions {
  std::vector<double> h_list{1e-2, 1e-3, 1e-4};
  double min_order = 0.9;
  double jump_factor = 50.0;   // bound on |D+ - D-| per unit dt
  int n_samples = 40;
  std::uint64_t seed = 5;
  double probe_radius = 0.2;
};

/// Hypotheses of the model transition theorem, checked numerically:
/// (ii) no kinks in s (one-sided difference quotients agree to O(dt)),
/// (iii)/(iv) moduli of continuity of d2 phi_s and d(ds phi)_s contract
/// when the probe distance halves, (v) exact s-constancy outside the
/// common horizon on nodes; then the C^1 finite-difference probe of the
/// induced map on W^{1,2} fields.
VerificationReport model_hypotheses_check(
    const FinDimManifold& Mx, const ManifoldPath& x,
    const BasicTrivialization& Tx, const FinDimManifold& My,
    const ManifoldPath& y, const BasicTrivialization& Ty,
    const GridPath& probe_xi, const GridPath& probe_eta,
    const ModelCheckOptions& opt);

/// Change of trivialization xi -> T~ o T^{-1} xi, a bounded linear map on
/// discretized W^{1,2} fields.
struct TrivializationChange {
  std::function<GridPath(const GridPath&)> apply;
  std::function<GridPath(const GridPath&)> apply_inverse;
};

TrivializationChange trivialization_change(const BasicTrivialization& from,
                                           const BasicTrivialization& to);

/// Sampled W^{1,2} operator norms of the change of trivialization and its
/// inverse, plus the roundtrip identity on random fields.
VerificationReport trivialization_change_report(
    const BasicTrivialization& from, const BasicTrivialization& to,
    const TimeGrid& grid, int n, std::uint64_t seed);

/// CSV of ambient coordinates, one row per node.
void write_manifold_csv(std::ostream& out, const ManifoldPath& p);

}  // namespace pathatlas
