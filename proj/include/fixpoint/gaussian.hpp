#pragma once

// Representation-generic Gaussian arithmetic. A covariance is stored either
// as the dense matrix itself or as a generalized Cholesky factor L with
// Sigma = L * L^T. Every binary operation requires both operands to use the
// same representation; the factor paths combine covariances through QR
// decompositions and never subtract them.

#include "fixpoint/types.hpp"

namespace fixpoint {

enum class Rep { Dense, Factor };

const char* to_string(Rep rep);

template <typename T>
class Covariance {
 public:
  /// Empty Dense covariance (dimension 0).
  Covariance() = default;

  static Covariance dense(Matrix<T> sigma);
  static Covariance factor(Matrix<T> chol);
  static Covariance zero(Index dim, Rep rep);

  Rep rep() const { return rep_; }
  bool is_factor() const { return rep_ == Rep::Factor; }
  Index dim() const { return matrix_.rows(); }

  /// The stored matrix: Sigma for Dense, L for Factor.
  const Matrix<T>& matrix() const { return matrix_; }

  /// Sigma, reconstructed as L * L^T for Factor.
  Matrix<T> covariance() const;

  template <typename U>
  Covariance<U> cast() const {
    return rep_ == Rep::Dense ? Covariance<U>::dense(matrix_.template cast<U>())
                              : Covariance<U>::factor(matrix_.template cast<U>());
  }

 private:
  Covariance(Rep rep, Matrix<T> matrix) : rep_(rep), matrix_(std::move(matrix)) {}

  Rep rep_ = Rep::Dense;
  Matrix<T> matrix_;
};

template <typename T>
struct Gaussian {
  Vector<T> mean;
  Covariance<T> cov;

  Index dim() const { return mean.size(); }

  template <typename U>
  Gaussian<U> cast() const {
    return {mean.template cast<U>(), cov.template cast<U>()};
  }
};

/// p(a | b) = N(gain * b + offset, noise).
template <typename T>
struct AffineConditional {
  Matrix<T> gain;
  Vector<T> offset;
  Covariance<T> noise;

  Index input_dim() const { return gain.cols(); }
  Index output_dim() const { return gain.rows(); }

  /// (I, 0, 0): the conditional that returns its input unchanged.
  static AffineConditional identity(Index dim, Rep rep);
};

/// L = R^T for the thin QR decomposition Q R = M of an n x m matrix, n >= m.
/// L is lower triangular with nonnegative diagonal and L L^T = M^T M.
template <typename T>
Matrix<T> qr_r_factor(const Matrix<T>& stacked);

/// Generalized Cholesky factor of a covariance. Factor inputs pass through;
/// positive definite Dense inputs yield the ordinary Cholesky factor; singular
/// ones go through a clamped eigendecomposition and are re-triangularized.
template <typename T>
Covariance<T> to_factor(const Covariance<T>& cov);

template <typename T>
Covariance<T> to_dense(const Covariance<T>& cov);

template <typename T>
Covariance<T> to_rep(const Covariance<T>& cov, Rep rep);

template <typename T>
Gaussian<T> to_rep(const Gaussian<T>& g, Rep rep);

/// Lower-triangular factor of the positive semidefinite matrix nearest to a
/// symmetric input: every negative eigenvalue is set to zero, whatever its size.
template <typename T>
Matrix<T> psd_projection_factor(const Matrix<T>& sigma);

/// N(G m + p, G C G^T + P).
template <typename T>
Gaussian<T> marginalize(const AffineConditional<T>& cond, const Gaussian<T>& g);

/// Integrates out the middle variable of p(x0 | x_mid) p(x_mid | x_k).
template <typename T>
AffineConditional<T> compose_conditionals(const AffineConditional<T>& outer,
                                          const AffineConditional<T>& inner);

template <typename T>
struct BlockQrConditioning {
  Matrix<T> obs_cov_factor;        ///< d x d lower-triangular factor of H C H^T + R
  Matrix<T> gain;                  ///< D x d
  Matrix<T> posterior_cov_factor;  ///< D x D lower-triangular
};

/// Conditions a factor-form prior on a linear observation with a single QR of
///
///   [ noise_factor^T              0            ]
///   [ prior_factor^T H^T    prior_factor^T ]
///
/// Raises SingularInnovation if the leading triangular block is singular.
template <typename T>
BlockQrConditioning<T> condition_block_qr(const Matrix<T>& prior_factor,
                                          const Matrix<T>& obs_matrix,
                                          const Matrix<T>& noise_factor);

/// Same decomposition with a caller-chosen error kind for the singular case.
template <typename T>
BlockQrConditioning<T> condition_block_qr(const Matrix<T>& prior_factor,
                                          const Matrix<T>& obs_matrix,
                                          const Matrix<T>& noise_factor,
                                          ErrorKind on_singular);

template <typename T>
T log_density(const Gaussian<T>& g, const Vector<T>& y);

/// Throws DimensionMismatch unless rows x cols matches.
template <typename Derived>
void require_shape(const Eigen::MatrixBase<Derived>& m, Index rows, Index cols,
                   const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + " has shape " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                    "x" + std::to_string(cols));
  }
}

}  // namespace fixpoint
