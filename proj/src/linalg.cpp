#include "ramcmc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ramcmc {

namespace {

void check_square(const Eigen::MatrixXd& m, const char* who) {
  if (m.rows() != m.cols())
    throw DimensionMismatch(std::string(who) + ": matrix is not square");
}

void check_symmetric(const Eigen::MatrixXd& m, const char* who) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-10 * scale)
        throw DimensionMismatch(std::string(who) + ": matrix is not symmetric");
}

}  // namespace

LowerTriangularFactor::LowerTriangularFactor(Eigen::MatrixXd lower) : matrix_(std::move(lower)) {
  check_square(matrix_, "LowerTriangularFactor");
  if (matrix_.rows() < 1)
    throw DimensionMismatch("LowerTriangularFactor: dimension must be positive");
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < matrix_.cols(); ++j)
      if (matrix_(i, j) != 0.0)
        throw std::invalid_argument("LowerTriangularFactor: nonzero entry above the diagonal");
    if (!(matrix_(i, i) > 0.0) || !std::isfinite(matrix_(i, i)))
      throw std::invalid_argument("LowerTriangularFactor: diagonal must be strictly positive");
  }
}

LowerTriangularFactor LowerTriangularFactor::identity(Eigen::Index dim) {
  return LowerTriangularFactor(Eigen::MatrixXd::Identity(dim, dim));
}

LowerTriangularFactor LowerTriangularFactor::scaled_identity(Eigen::Index dim, double scale) {
  return LowerTriangularFactor(scale * Eigen::MatrixXd::Identity(dim, dim));
}

SymmetricMatrix LowerTriangularFactor::product() const {
  Eigen::MatrixXd p = matrix_ * matrix_.transpose();
  symmetrize_from_lower(p);
  return p;
}

Eigen::VectorXd LowerTriangularFactor::apply(const Eigen::VectorXd& u) const {
  if (u.size() != dim()) throw DimensionMismatch("LowerTriangularFactor::apply");
  return matrix_.triangularView<Eigen::Lower>() * u;
}

void symmetrize_from_lower(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) m(i, j) = m(j, i);
}

LowerTriangularFactor cholesky_factorize(const SymmetricMatrix& m) {
  check_square(m, "cholesky_factorize");
  check_symmetric(m, "cholesky_factorize");
  const Eigen::Index n = m.rows();
  if (n < 1) throw DimensionMismatch("cholesky_factorize: dimension must be positive");

  const double tol = 1e-14 * m.diagonal().maxCoeff();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > tol) || !std::isfinite(pivot))
      throw NotPositiveDefinite("cholesky_factorize: pivot " + std::to_string(j) +
                                    " is not positive",
                                static_cast<int>(j));
    l(j, j) = std::sqrt(pivot);
    const Eigen::Index tail = n - j - 1;
    if (tail > 0) {
      l.col(j).tail(tail) =
          (m.col(j).tail(tail) - l.bottomLeftCorner(tail, j) * l.row(j).head(j).transpose()) /
          l(j, j);
    }
  }
  return LowerTriangularFactor(LowerTriangularFactor::Unchecked{}, std::move(l));
}

LowerTriangularFactor rank_one_update(const LowerTriangularFactor& factor,
                                      const Eigen::VectorXd& v, double a) {
  const Eigen::Index n = factor.dim();
  if (v.size() != n) throw DimensionMismatch("rank_one_update: vector length mismatch");
  if (a == 0.0 || v.squaredNorm() == 0.0) return factor;

  Eigen::MatrixXd l = factor.matrix();
  if (a > 0.0) {
    Eigen::VectorXd w = std::sqrt(a) * v;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double r = std::hypot(l(k, k), w[k]);
      const double c = r / l(k, k);
      const double s = w[k] / l(k, k);
      l(k, k) = r;
      const Eigen::Index tail = n - k - 1;
      if (tail > 0) {
        l.col(k).tail(tail) = (l.col(k).tail(tail) + s * w.tail(tail)) / c;
        w.tail(tail) = c * w.tail(tail) - s * l.col(k).tail(tail);
      }
    }
    return LowerTriangularFactor(LowerTriangularFactor::Unchecked{}, std::move(l));
  }

  // Downdate: solve L p = sqrt(-a) v, then sweep rotations right to left.
  Eigen::VectorXd p = l.triangularView<Eigen::Lower>().solve(std::sqrt(-a) * v);
  const double s2 = 1.0 - p.squaredNorm();
  // Below 1e-12 of remaining mass the sweep has too few good digits left;
  // the explicit refactorization fallback owns that boundary.
  if (!(s2 > 1e-12))
    throw DowndateFailure("rank_one_update: downdate loses positive definiteness");
  double rho = std::sqrt(s2);
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const double r = std::hypot(rho, p[i]);
    const double c = rho / r;
    const double s = p[i] / r;
    rho = r;
    const Eigen::Index len = n - i;
    const Eigen::VectorXd carry_old = carry.tail(len);
    carry.tail(len) = c * carry_old + s * l.col(i).tail(len);
    l.col(i).tail(len) = c * l.col(i).tail(len) - s * carry_old;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i)))
      throw DowndateFailure("rank_one_update: downdated diagonal not positive");
  return LowerTriangularFactor(LowerTriangularFactor::Unchecked{}, std::move(l));
}

LowerTriangularFactor rank_one_update_with_fallback(const LowerTriangularFactor& factor,
                                                    const Eigen::VectorXd& v, double a) {
  try {
    return rank_one_update(factor, v, a);
  } catch (const DowndateFailure&) {
    SymmetricMatrix rhs = factor.product();
    rhs.selfadjointView<Eigen::Lower>().rankUpdate(v, a);
    symmetrize_from_lower(rhs);
    return cholesky_factorize(rhs);
  }
}

Eigen::VectorXd symmetric_eigenvalues(const SymmetricMatrix& m, int max_sweeps) {
  check_square(m, "symmetric_eigenvalues");
  check_symmetric(m, "symmetric_eigenvalues");
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd a = m;
  symmetrize_from_lower(a);

  const double frob = a.norm();
  if (frob == 0.0 || n == 1) {
    Eigen::VectorXd eig = a.diagonal();
    std::sort(eig.begin(), eig.end());
    return eig;
  }

  const double off_tol = 1e-14 * frob;
  for (int sweep = 0;; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= off_tol) break;
    if (sweep >= max_sweeps)
      throw NoConvergence("symmetric_eigenvalues: Jacobi sweeps exhausted", sweep);

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
          a(p, k) = a(k, p);
          a(q, k) = a(k, q);
        }
      }
    }
  }

  Eigen::VectorXd eig = a.diagonal();
  std::sort(eig.begin(), eig.end());
  return eig;
}

Eigen::VectorXd symmetric_eigenvalues(const SymmetricMatrix& m) {
  return symmetric_eigenvalues(m, static_cast<int>(100 * m.rows()));
}

double directional_radius(const LowerTriangularFactor& factor, const Eigen::VectorXd& unit_v) {
  if (unit_v.size() != factor.dim()) throw DimensionMismatch("directional_radius");
  if (std::abs(unit_v.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("directional_radius: direction must be a unit vector");
  return (factor.matrix().transpose() * unit_v).norm();
}

}  // namespace ramcmc
