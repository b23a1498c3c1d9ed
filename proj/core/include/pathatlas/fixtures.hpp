#pragma once

#include <Eigen/Dense>

#include "pathatlas/atlas.hpp"
#include "pathatlas/expcharts.hpp"
#include "pathatlas/funcspace.hpp"
#include "pathatlas/rng.hpp"
#include "pathatlas/tame.hpp"

namespace pathatlas::fixtures {

/// Scalar maps on the one-mode constant scale.
TameMap scalar_tame(const ScalarMap& m);

/// Linear map given by a dense matrix.
TameMap matrix_map(const ScaleHandle& scale, const Eigen::MatrixXd& A);

/// The shear u -> u + g(<a,u>) b with <a,b> = 0 in the coefficient
/// pairing; a global diffeomorphism with the closed-form inverse
/// y -> y - g(<a,y>) b.
TameMap shear_map(const ScaleHandle& scale, const ScaleVector& a,
                  const ScaleVector& b, const ScalarMap& g);
TameMap shear_map_inverse(const ScaleHandle& scale, const ScaleVector& a,
                          const ScaleVector& b, const ScalarMap& g);

/// Chart from a global diffeomorphism pair restricted to the H1-ball
/// B_rho(center) in chart coordinates.
ChartMap ball_chart(TameMap fwd, TameMap inv, const ScaleVector& center,
                    double rho);

/// Random compactly supported smooth field: a few sine waves per mode
/// under a plateau cutoff; w12 norm of order `amplitude`.
GridPath random_bump_path(const TimeGrid& grid, const ScaleHandle& scale,
                          Rng& rng, double amplitude);

/// A two- or three-chart covering of a curved basic path in the
/// loop_scale(4) model space, with shear-warped charts. Variants 0 and 1
/// give different basic paths with the same endpoints and different
/// charts and junction times, so transitions exercise all four case
/// formulas. The raw covering carries a linear twist at each junction
/// that normalize_covering must remove.
struct WarpedAtlasFixture {
  ScaleHandle scale;
  TimeGrid grid;
  BasicPath path;
  ChartCollection raw;
  std::vector<double> t_minus;
};

WarpedAtlasFixture make_warped_atlas(int k, int variant, const TimeGrid& grid);

/// Build the calibrated path chart of a warped atlas fixture
/// (normalize + calibrate).
PathChart calibrated_chart(const WarpedAtlasFixture& fx,
                           const CalibrationOptions& opt);

/// Basic paths on the unit sphere: a great-circle-ish arc between two
/// fixed points, time profile a quintic step; variant 1 bends through a
/// slightly different arc.
ManifoldPath sphere_basic_path(const TimeGrid& grid, double T, int variant);

/// Basic paths in flat R^n / the conformal plane.
ManifoldPath plane_basic_path(const TimeGrid& grid, double T, int variant);

}  // namespace pathatlas::fixtures
