#pragma once

#include <memory>
#include <vector>

#include "pathatlas/errors.hpp"

namespace pathatlas {

/// A two-level weighted coefficient space: the finite spectral model of a
/// pair of Hilbert spaces H2 c H1 sharing one coefficient basis. Level
/// norms are |x|_level^2 = sum_k w_level[k] * x[k]^2.
///
/// Invariants enforced on construction:
///   - w1[k] <= w2[k]           (so |.|_1 <= |.|_2 with constant 1)
///   - w1[k]/w2[k] nonincreasing (tail ratios shrink, the finite surrogate
///                                of a compact inclusion)
class ScalePair {
 public:
  ScalePair(std::vector<double> w1, std::vector<double> w2);

  /// Real Fourier model of W^{1,2}(S^1) > W^{2,2}(S^1): one constant mode
  /// plus cosine/sine pairs for k = 1..K with w1 = 1+k^2, w2 = (1+k^2)^2.
  static std::shared_ptr<const ScalePair> loop(int K);

  /// Constant scale w1 = w2 = 1 in dimension n (both levels coincide).
  static std::shared_ptr<const ScalePair> constant(int n);

  int modes() const { return static_cast<int>(w1_.size()); }
  const std::vector<double>& weights(int level) const;

  bool operator==(const ScalePair& o) const {
    return w1_ == o.w1_ && w2_ == o.w2_;
  }

  /// Per-mode w1[k]/w2[k]; nonincreasing by the class invariant.
  std::vector<double> compactness_ratio() const;

 private:
  std::vector<double> w1_, w2_;
};

using ScaleHandle = std::shared_ptr<const ScalePair>;

/// Same coefficient space: identical handle or identical weights.
inline bool same_scale(const ScaleHandle& a, const ScaleHandle& b) {
  return a == b || (a && b && *a == *b);
}

/// An element of the two-level coefficient space, tagged with its scale.
struct ScaleVector {
  ScaleHandle scale;
  std::vector<double> c;

  ScaleVector() = default;
  ScaleVector(ScaleHandle s, std::vector<double> coeffs);

  static ScaleVector zero(const ScaleHandle& s);
  static ScaleVector basis(const ScaleHandle& s, int k, double value = 1.0);

  int dim() const { return static_cast<int>(c.size()); }

  double norm(int level) const;
  double inner(const ScaleVector& other, int level) const;

  ScaleVector& operator+=(const ScaleVector& o);
  ScaleVector& operator-=(const ScaleVector& o);
  ScaleVector& operator*=(double a);
};

ScaleVector operator+(ScaleVector a, const ScaleVector& b);
ScaleVector operator-(ScaleVector a, const ScaleVector& b);
ScaleVector operator*(double a, ScaleVector v);
ScaleVector operator-(ScaleVector v);

/// y += a*x
void axpy(double a, const ScaleVector& x, ScaleVector& y);

/// Weighted norm sqrt(sum_k w_level[k] x[k]^2); level in {1,2}.
double scale_norm(const ScaleVector& x, int level);

}  // namespace pathatlas
