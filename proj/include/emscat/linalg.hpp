#pragma once

#include <Eigen/Dense>

namespace emscat {

// Largest spatial dimension supported; vectors live on the stack.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
// Stacked integrands (e.g. [F, s*F]).
using StackVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4 * kMaxDim, 1>;

inline Vec unit(int d, int i) {
  Vec e = Vec::Zero(d);
  e(i) = 1.0;
  return e;
}

inline double sup_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace emscat
