#include "pathatlas/linalg.hpp"

#include <cmath>

#include "pathatlas/rng.hpp"

namespace pathatlas {

Eigen::MatrixXd materialize(
    const ScaleHandle& scale,
    const std::function<ScaleVector(const ScaleVector&)>& apply) {
  const int n = scale->modes();
  Eigen::MatrixXd A(n, n);
  for (int k = 0; k < n; ++k) {
    const ScaleVector col = apply(ScaleVector::basis(scale, k));
    for (int i = 0; i < n; ++i) A(i, k) = col.c[i];
  }
  return A;
}

double operator_norm(const Eigen::MatrixXd& A, const ScaleHandle& scale,
                     int level, std::uint64_t seed, int steps, int restarts) {
  const int n = scale->modes();
  const auto& w = scale->weights(level);
  Eigen::VectorXd sqw(n);
  for (int i = 0; i < n; ++i) sqw(i) = std::sqrt(w[i]);
  // B = W^{1/2} A W^{-1/2}; power-iterate B^T B
  Eigen::MatrixXd B = A;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) *= sqw(i) / sqw(j);
  const Eigen::MatrixXd G = B.transpose() * B;

  double best = 0.0;
  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.gaussian();
    double nv = v.norm();
    if (nv == 0.0) continue;
    v /= nv;
    double lambda = 0.0;
    for (int it = 0; it < steps; ++it) {
      Eigen::VectorXd gv = G * v;
      lambda = v.dot(gv);
      const double norm = gv.norm();
      if (norm == 0.0) {
        lambda = 0.0;
        break;
      }
      v = gv / norm;
    }
    best = std::max(best, lambda);
  }
  return std::sqrt(std::max(best, 0.0));
}

Eigen::VectorXd to_eigen(const ScaleVector& v) {
  Eigen::VectorXd out(v.dim());
  for (int i = 0; i < v.dim(); ++i) out(i) = v.c[i];
  return out;
}

ScaleVector from_eigen(const ScaleHandle& scale, const Eigen::VectorXd& v) {
  std::vector<double> c(v.size());
  for (int i = 0; i < v.size(); ++i) c[i] = v(i);
  return ScaleVector(scale, std::move(c));
}

}  // namespace pathatlas
