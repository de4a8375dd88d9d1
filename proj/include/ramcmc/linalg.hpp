#pragma once

#include <Eigen/Core>

#include "ramcmc/errors.hpp"

namespace ramcmc {

/// Symmetric matrices are plain dense Eigen matrices; functions taking one
/// expect entries[i][j] == entries[j][i] and check it up to roundoff.
using SymmetricMatrix = Eigen::MatrixXd;

/// Lower-triangular matrix with strictly positive diagonal, so that
/// L * L^T is symmetric positive definite. Immutable once constructed.
class LowerTriangularFactor {
 public:
  /// Empty (dimension-zero) factor; placeholder until assigned.
  LowerTriangularFactor() : matrix_(0, 0) {}

  /// Validates triangularity and diagonal positivity.
  explicit LowerTriangularFactor(Eigen::MatrixXd lower);

  static LowerTriangularFactor identity(Eigen::Index dim);
  static LowerTriangularFactor scaled_identity(Eigen::Index dim, double scale);

  Eigen::Index dim() const { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Eigen::VectorXd diagonal() const { return matrix_.diagonal(); }

  /// L * L^T, exactly symmetric (upper half mirrored from the lower half).
  SymmetricMatrix product() const;

  /// L * u using only the lower triangle.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

 private:
  struct Unchecked {};
  LowerTriangularFactor(Unchecked, Eigen::MatrixXd lower) : matrix_(std::move(lower)) {}

  Eigen::MatrixXd matrix_;

  friend LowerTriangularFactor cholesky_factorize(const SymmetricMatrix&);
  friend LowerTriangularFactor rank_one_update(const LowerTriangularFactor&,
                                               const Eigen::VectorXd&, double);
};

/// Cholesky factor of a symmetric positive definite matrix.
/// Throws NotPositiveDefinite (with the failing pivot index) when any pivot
/// falls at or below 1e-14 times the largest diagonal entry.
LowerTriangularFactor cholesky_factorize(const SymmetricMatrix& m);

/// Returns L' with L' L'^T = L L^T + a v v^T, by a Givens carry sweep when
/// a > 0 and a LINPACK-style rotation sweep when a < 0, both O(d^2).
/// Throws DowndateFailure when the downdate would lose positive definiteness;
/// callers can then refactorize the explicitly formed right-hand side.
LowerTriangularFactor rank_one_update(const LowerTriangularFactor& factor,
                                      const Eigen::VectorXd& v, double a);

/// rank_one_update with the DowndateFailure fallback applied: on failure the
/// right-hand side is formed explicitly and refactorized from scratch.
LowerTriangularFactor rank_one_update_with_fallback(const LowerTriangularFactor& factor,
                                                    const Eigen::VectorXd& v, double a);

/// All eigenvalues of a symmetric matrix in ascending order, via cyclic
/// Jacobi sweeps. Throws NoConvergence after max_sweeps (default 100 * dim).
Eigen::VectorXd symmetric_eigenvalues(const SymmetricMatrix& m, int max_sweeps);
Eigen::VectorXd symmetric_eigenvalues(const SymmetricMatrix& m);

/// Radius ||L^T v|| of the contour ellipsoid of L L^T in the unit direction v.
double directional_radius(const LowerTriangularFactor& factor, const Eigen::VectorXd& unit_v);

/// Mirrors the lower triangle onto the upper one (exact symmetry).
void symmetrize_from_lower(Eigen::MatrixXd& m);

}  // namespace ramcmc
