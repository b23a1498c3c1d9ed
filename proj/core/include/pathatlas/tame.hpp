#pragma once

#include <cstdint>
#include <functional>

#include "pathatlas/report.hpp"
#include "pathatlas/rng.hpp"
#include "pathatlas/scales.hpp"

namespace pathatlas {

/// A twice-differentiable map between two-level coefficient spaces,
/// given by its evaluation, first and second differentials, and an
/// H1-open domain predicate. All closures must be pure.
struct TameMap {
  ScaleHandle scale;
  std::function<ScaleVector(const ScaleVector&)> eval;
  /// d1(x, eta) = dphi|_x eta, linear in eta.
  std::function<ScaleVector(const ScaleVector&, const ScaleVector&)> d1;
  /// d2(x, xi, eta) = d^2 phi|_x (xi, eta), bilinear and symmetric.
  std::function<ScaleVector(const ScaleVector&, const ScaleVector&,
                            const ScaleVector&)> d2;
  std::function<bool(const ScaleVector&)> domain;
  bool fixes_origin = false;
};

/// Empirical certificate for the second-derivative bound
///   |d^2 phi|_y (xi,eta)|_2 <= kappa (|xi|_1|eta|_2 + |xi|_2|eta|_1
///                                     + |y|_2|xi|_1|eta|_1)
/// sampled over an H1-ball. A certificate can refute the bound; a pass
/// means "no violation found in n samples".
struct TamenessCertificate {
  ScaleVector center;
  double radius = 0.0;
  double kappa = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0.0;
  bool passed = false;

  Json to_json() const;
};

/// Uniform sample in the H1-ball B_r(center): Gaussian direction
/// normalized in |.|_1 times r * u^(1/dim).
ScaleVector sample_in_ball(Rng& rng, const ScaleVector& center, double r);
/// Gaussian coefficients renormalized to |.|_1 = 1.
ScaleVector sample_direction(Rng& rng, const ScaleHandle& scale);

TamenessCertificate verify_tameness(const TameMap& map, const ScaleVector& x,
                                    double r, double kappa, int n,
                                    std::uint64_t seed);

/// Margin-inflated empirical sup of the tameness ratio
/// (max_ratio * 1.1, floored at 1e-12). Deterministic given the seed.
double estimate_kappa(const TameMap& map, const ScaleVector& x, double r,
                      int n, std::uint64_t seed);

enum class DerivedEstimateMode { Zeroth, First, Difference, All };

/// Fit the constants of the derived estimates on sampled points:
///   |phi(y)|_2        <= k0 (1 + |y|_2)
///   |dphi|_y eta|_2   <= k1 (|eta|_2 + |y|_2 |eta|_1)
///   |(dphi|_y1 - dphi|_y0) eta|_2
///     <= kd (|y1-y0|_1|eta|_2 + |y1-y0|_2|eta|_1)
///        + kd/2 (|y1|_2+|y0|_2)|y1-y0|_1|eta|_1 .
VerificationReport check_derived_estimates(const TameMap& map,
                                           const ScaleVector& x, double r,
                                           double kappa,
                                           DerivedEstimateMode mode, int n,
                                           std::uint64_t seed);

/// Chain-rule composition psi o phi with
/// d2(psi o phi)(xi,eta) = d2psi(dphi xi, dphi eta) + dpsi d2phi(xi,eta).
TameMap compose(const TameMap& psi, const TameMap& phi);

/// Predicted constant for the composition of two maps sharing the
/// enlarged constant kappa.
double composition_kappa(double kappa);

/// Sampled check that phi maps B_r(x) into the domain of psi.
bool check_composable(const TameMap& psi, const TameMap& phi,
                      const ScaleVector& x, double r, int n,
                      std::uint64_t seed);

/// Enlarge kappa so it dominates all six constants used by the
/// composition bound: the three two-level estimates fitted by
/// check_derived_estimates plus the level-1 bounds
/// |phi(y)|_1 <= kappa, |dphi eta|_1 <= kappa|eta|_1,
/// |d2phi(xi,eta)|_1 <= kappa|xi|_1|eta|_1.
double enlarged_kappa(const TameMap& map, const ScaleVector& x, double r,
                      double kappa, int n, std::uint64_t seed);

/// Scalar C^4 function with its derivatives, the ingredient of the
/// loop-space transition maps.
struct ScalarMap {
  std::function<double(double)> f, d1, d2, d3, d4;
};

/// u -> u + c*sin(u); a diffeomorphism for |c| < 1.
ScalarMap scalar_sine_map(double c);
ScalarMap scalar_identity_map();
ScalarMap scalar_shift_map(double c);

/// The map x(t) -> phi(x(t)) on truncated real Fourier loops:
/// collocation at n_colloc equispaced circle points, pointwise
/// application, then projection back to K modes. Requires
/// n_colloc >= 4K+1 so quadratic products alias weakly.
TameMap loop_transition_map(const ScalarMap& phi, int K, int n_colloc);

/// Pointwise synthesis of a loop coefficient vector at angle t.
double loop_synthesis(const ScaleVector& x, double t);

/// A C^2 map on R^n wrapped over the constant scale w1 = w2 = 1.
TameMap constant_scale_map(
    int n, std::function<std::vector<double>(const std::vector<double>&)> f,
    std::function<std::vector<double>(const std::vector<double>&,
                                      const std::vector<double>&)> d1,
    std::function<std::vector<double>(const std::vector<double>&,
                                      const std::vector<double>&,
                                      const std::vector<double>&)> d2);

TameMap identity_map(const ScaleHandle& scale);
/// x -> x + c
TameMap translation_map(const ScaleVector& c);
/// Linear map from its action; d2 = 0.
TameMap linear_map(const ScaleHandle& scale,
                   std::function<ScaleVector(const ScaleVector&)> apply);
/// x -> diag(d) x
TameMap diagonal_map(const ScaleHandle& scale, const std::vector<double>& d);

/// Central-difference consistency of d1 against eval and d2 against d1
/// at `n` sampled points of B_r(x); err = |analytic - fd| / (1 + |analytic|).
VerificationReport check_differentials(const TameMap& map,
                                       const ScaleVector& x, double r, int n,
                                       std::uint64_t seed, double step = 1e-4,
                                       double tol = 1e-5);

}  // namespace pathatlas
