#include "finsler/linalg.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

namespace finsler {

std::vector<double> symmetric_eigenvalues(const Mat& m) {
  const int n = m.size();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()(i);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace finsler
