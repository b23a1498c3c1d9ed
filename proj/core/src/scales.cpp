#include "pathatlas/scales.hpp"

#include <cmath>

namespace pathatlas {

ScalePair::ScalePair(std::vector<double> w1, std::vector<double> w2)
    : w1_(std::move(w1)), w2_(std::move(w2)) {
  PATHATLAS_REQUIRE(!w1_.empty(), "ScalePair needs at least one mode");
  PATHATLAS_REQUIRE(w1_.size() == w2_.size(), "weight sequences differ in length");
  double prev_ratio = 1.0;
  for (std::size_t k = 0; k < w1_.size(); ++k) {
    PATHATLAS_REQUIRE(w1_[k] > 0.0 && w2_[k] > 0.0, "weights must be positive");
    PATHATLAS_REQUIRE(w1_[k] <= w2_[k], "w1[k] <= w2[k] violated");
    const double ratio = w1_[k] / w2_[k];
    PATHATLAS_REQUIRE(ratio <= prev_ratio * (1.0 + 1e-15),
                      "w1/w2 must be nonincreasing over modes");
    prev_ratio = ratio;
  }
}

std::shared_ptr<const ScalePair> ScalePair::loop(int K) {
  PATHATLAS_REQUIRE(K >= 0, "loop scale needs K >= 0");
  std::vector<double> w1, w2;
  w1.reserve(2 * K + 1);
  w2.reserve(2 * K + 1);
  w1.push_back(1.0);
  w2.push_back(1.0);
  for (int k = 1; k <= K; ++k) {
    const double a = 1.0 + static_cast<double>(k) * k;
    for (int copy = 0; copy < 2; ++copy) {  // cosine and sine mode
      w1.push_back(a);
      w2.push_back(a * a);
    }
  }
  return std::make_shared<const ScalePair>(std::move(w1), std::move(w2));
}

std::shared_ptr<const ScalePair> ScalePair::constant(int n) {
  PATHATLAS_REQUIRE(n >= 1, "constant scale needs n >= 1");
  return std::make_shared<const ScalePair>(std::vector<double>(n, 1.0),
                                           std::vector<double>(n, 1.0));
}

const std::vector<double>& ScalePair::weights(int level) const {
  PATHATLAS_REQUIRE(level == 1 || level == 2, "level must be 1 or 2");
  return level == 1 ? w1_ : w2_;
}

std::vector<double> ScalePair::compactness_ratio() const {
  std::vector<double> r(w1_.size());
  for (std::size_t k = 0; k < w1_.size(); ++k) r[k] = w1_[k] / w2_[k];
  return r;
}

ScaleVector::ScaleVector(ScaleHandle s, std::vector<double> coeffs)
    : scale(std::move(s)), c(std::move(coeffs)) {
  PATHATLAS_REQUIRE(scale != nullptr, "ScaleVector needs a scale");
  PATHATLAS_REQUIRE(static_cast<int>(c.size()) == scale->modes(),
                    "coefficient count does not match scale");
  for (double x : c) PATHATLAS_REQUIRE(std::isfinite(x), "nonfinite coefficient");
}

ScaleVector ScaleVector::zero(const ScaleHandle& s) {
  return ScaleVector(s, std::vector<double>(s->modes(), 0.0));
}

ScaleVector ScaleVector::basis(const ScaleHandle& s, int k, double value) {
  PATHATLAS_REQUIRE(k >= 0 && k < s->modes(), "basis index out of range");
  std::vector<double> c(s->modes(), 0.0);
  c[k] = value;
  return ScaleVector(s, std::move(c));
}

double ScaleVector::norm(int level) const { return scale_norm(*this, level); }

double ScaleVector::inner(const ScaleVector& other, int level) const {
  PATHATLAS_REQUIRE(dim() == other.dim(), "dimension mismatch");
  const auto& w = scale->weights(level);
  double s = 0.0;
  for (int k = 0; k < dim(); ++k) s += w[k] * c[k] * other.c[k];
  return s;
}

ScaleVector& ScaleVector::operator+=(const ScaleVector& o) {
  PATHATLAS_REQUIRE(dim() == o.dim(), "dimension mismatch");
  for (int k = 0; k < dim(); ++k) c[k] += o.c[k];
  return *this;
}

ScaleVector& ScaleVector::operator-=(const ScaleVector& o) {
  PATHATLAS_REQUIRE(dim() == o.dim(), "dimension mismatch");
  for (int k = 0; k < dim(); ++k) c[k] -= o.c[k];
  return *this;
}

ScaleVector& ScaleVector::operator*=(double a) {
  for (auto& x : c) x *= a;
  return *this;
}

ScaleVector operator+(ScaleVector a, const ScaleVector& b) { return a += b; }
ScaleVector operator-(ScaleVector a, const ScaleVector& b) { return a -= b; }
ScaleVector operator*(double a, ScaleVector v) { return v *= a; }
ScaleVector operator-(ScaleVector v) { return v *= -1.0; }

void axpy(double a, const ScaleVector& x, ScaleVector& y) {
  PATHATLAS_REQUIRE(x.dim() == y.dim(), "dimension mismatch");
  for (int k = 0; k < x.dim(); ++k) y.c[k] += a * x.c[k];
}

double scale_norm(const ScaleVector& x, int level) {
  const auto& w = x.scale->weights(level);
  PATHATLAS_REQUIRE(w.size() == x.c.size(), "coefficient/weight length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * x.c[k] * x.c[k];
  return std::sqrt(s);
}

}  // namespace pathatlas
