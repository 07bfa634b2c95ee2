#pragma once

/*
 * Independent eigendecomposition oracle. Backed by Eigen's self-adjoint
 * solver so it shares no code with the cyclic Jacobi implementation it is
 * used to cross-check. Output is made deterministic: eigenvalues sorted
 * descending, each eigenvector scaled so its largest-magnitude component
 * is real and positive.
 */

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nslab/complex_matrix.hpp"

namespace nslab {

struct Evd {
  std::vector<double> eigenvalues;  // descending
  ComplexMatrix eigenvectors;       // unitary, column i pairs with value i
};

inline Evd reference_evd(const HermitianMatrix& g) {
  const std::size_t n = g.order();
  if (n == 0) throw std::invalid_argument("reference_evd: empty matrix");
  Eigen::MatrixXcd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = g.at(i, j);
  if (!a.allFinite()) throw std::invalid_argument("reference_evd: non-finite");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("reference_evd: solver failed");

  Evd out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = n - 1 - k;  // Eigen sorts ascending
    out.eigenvalues[k] = solver.eigenvalues()(static_cast<Eigen::Index>(src));
    Eigen::VectorXcd v = solver.eigenvectors().col(static_cast<Eigen::Index>(src));
    // Phase fix: largest-magnitude component real positive.
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double mag = std::abs(v(i));
      if (mag > best + 1e-15) {
        best = mag;
        imax = i;
      }
    }
    if (best > 0) v *= std::conj(v(imax)) / std::abs(v(imax));
    for (std::size_t i = 0; i < n; ++i)
      out.eigenvectors(i, k) = v(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace nslab
