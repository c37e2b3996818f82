#include "fixpoint/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace fixpoint {

const char* to_string(Rep rep) { return rep == Rep::Dense ? "dense" : "factor"; }

template <typename T>
Covariance<T> Covariance<T>::dense(Matrix<T> sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "dense covariance must be square");
  }
  return Covariance(Rep::Dense, std::move(sigma));
}

template <typename T>
Covariance<T> Covariance<T>::factor(Matrix<T> chol) {
  if (chol.rows() != chol.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "covariance factor must be square");
  }
  return Covariance(Rep::Factor, std::move(chol));
}

template <typename T>
Covariance<T> Covariance<T>::zero(Index dim, Rep rep) {
  return Covariance(rep, Matrix<T>::Zero(dim, dim));
}

template <typename T>
Matrix<T> Covariance<T>::covariance() const {
  if (rep_ == Rep::Dense) {
    return matrix_;
  }
  return matrix_ * matrix_.transpose();
}

template <typename T>
AffineConditional<T> AffineConditional<T>::identity(Index dim, Rep rep) {
  return {Matrix<T>::Identity(dim, dim), Vector<T>::Zero(dim), Covariance<T>::zero(dim, rep)};
}

template <typename T>
Matrix<T> qr_r_factor(const Matrix<T>& stacked) {
  const Index rows = stacked.rows();
  const Index cols = stacked.cols();
  if (rows < cols) {
    throw Error(ErrorKind::DimensionMismatch,
                "qr_r_factor needs at least as many rows as columns, got " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (cols == 0) {
    return Matrix<T>(0, 0);
  }
  Eigen::HouseholderQR<Matrix<T>> qr(stacked);
  Matrix<T> upper = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
  for (Index i = 0; i < cols; ++i) {
    if (upper(i, i) < T(0)) {
      upper.row(i) *= T(-1);
    }
  }
  return upper.transpose();
}

namespace {

template <typename T>
void require_same_rep(const Covariance<T>& a, const Covariance<T>& b, const char* where) {
  if (a.rep() != b.rep()) {
    throw Error(ErrorKind::RepresentationMismatch,
                std::string(where) + ": operands use " + to_string(a.rep()) + " and " +
                    to_string(b.rep()));
  }
}

// Clamped eigendecomposition; `limit` is the relative tolerance for negative
// eigenvalues (infinity disables the check).
template <typename T>
Matrix<T> eigen_factor(const Matrix<T>& sigma, T limit) {
  const Matrix<T> sym = T(0.5) * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix<T>> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::IndefiniteCovariance, "eigendecomposition did not converge");
  }
  Vector<T> values = eig.eigenvalues();
  const T scale = values.cwiseAbs().maxCoeff();
  if (values.minCoeff() < -limit * scale) {
    throw Error(ErrorKind::IndefiniteCovariance,
                "smallest eigenvalue " + std::to_string(double(values.minCoeff())) +
                    " relative to norm " + std::to_string(double(scale)));
  }
  values = values.cwiseMax(T(0)).cwiseSqrt();
  const Matrix<T> root = eig.eigenvectors() * values.asDiagonal();
  return qr_r_factor<T>(root.transpose());
}

template <typename T>
BlockQrConditioning<T> block_qr_impl(const Matrix<T>& prior_factor, const Matrix<T>& obs_matrix,
                                     const Matrix<T>& noise_factor, ErrorKind on_singular) {
  const Index state_dim = prior_factor.rows();
  const Index obs_dim = obs_matrix.rows();
  require_shape(prior_factor, state_dim, state_dim, "prior factor");
  require_shape(obs_matrix, obs_dim, state_dim, "observation matrix");
  require_shape(noise_factor, obs_dim, obs_dim, "noise factor");

  const Index n = obs_dim + state_dim;
  Matrix<T> stacked = Matrix<T>::Zero(n, n);
  stacked.topLeftCorner(obs_dim, obs_dim) = noise_factor.transpose();
  stacked.bottomLeftCorner(state_dim, obs_dim) =
      prior_factor.transpose() * obs_matrix.transpose();
  stacked.bottomRightCorner(state_dim, state_dim) = prior_factor.transpose();

  const Matrix<T> lower = qr_r_factor<T>(stacked);
  const Matrix<T> r1 = lower.topLeftCorner(obs_dim, obs_dim).transpose();
  const Matrix<T> r2 = lower.bottomLeftCorner(state_dim, obs_dim).transpose();

  const T scale = r1.norm();
  for (Index i = 0; i < obs_dim; ++i) {
    if (!(std::abs(r1(i, i)) > Tolerance<T>::singular * scale)) {
      throw Error(on_singular, "leading block of the QR factor is singular (diagonal " +
                                   std::to_string(i) + ")");
    }
  }
  Matrix<T> gain = r1.template triangularView<Eigen::Upper>().solve(r2).transpose();
  return {lower.topLeftCorner(obs_dim, obs_dim),
          std::move(gain),
          lower.bottomRightCorner(state_dim, state_dim)};
}

}  // namespace

template <typename T>
Covariance<T> to_factor(const Covariance<T>& cov) {
  if (cov.is_factor()) {
    return cov;
  }
  const Matrix<T>& sigma = cov.matrix();
  if (sigma.size() == 0) {
    return Covariance<T>::factor(sigma);
  }
  Eigen::LLT<Matrix<T>> llt(sigma);
  if (llt.info() == Eigen::Success) {
    Matrix<T> lower = llt.matrixL();
    if (lower.allFinite()) {
      return Covariance<T>::factor(std::move(lower));
    }
  }
  return Covariance<T>::factor(eigen_factor<T>(sigma, Tolerance<T>::indefinite));
}

template <typename T>
Covariance<T> to_dense(const Covariance<T>& cov) {
  if (!cov.is_factor()) {
    return cov;
  }
  return Covariance<T>::dense(cov.covariance());
}

template <typename T>
Covariance<T> to_rep(const Covariance<T>& cov, Rep rep) {
  return rep == Rep::Dense ? to_dense(cov) : to_factor(cov);
}

template <typename T>
Gaussian<T> to_rep(const Gaussian<T>& g, Rep rep) {
  return {g.mean, to_rep(g.cov, rep)};
}

template <typename T>
Matrix<T> psd_projection_factor(const Matrix<T>& sigma) {
  require_shape(sigma, sigma.rows(), sigma.rows(), "covariance");
  return eigen_factor<T>(sigma, std::numeric_limits<T>::infinity());
}

template <typename T>
Gaussian<T> marginalize(const AffineConditional<T>& cond, const Gaussian<T>& g) {
  require_shape(cond.gain, cond.gain.rows(), g.dim(), "conditional gain");
  require_shape(cond.offset, cond.gain.rows(), 1, "conditional offset");
  require_shape(cond.noise.matrix(), cond.gain.rows(), cond.gain.rows(), "conditional noise");
  require_shape(g.cov.matrix(), g.dim(), g.dim(), "covariance");
  require_same_rep(cond.noise, g.cov, "marginalize");

  Vector<T> mean = cond.gain * g.mean + cond.offset;
  if (!g.cov.is_factor()) {
    Matrix<T> cov = cond.gain * g.cov.matrix() * cond.gain.transpose() + cond.noise.matrix();
    return {std::move(mean), Covariance<T>::dense(std::move(cov))};
  }
  const Index out = cond.output_dim();
  Matrix<T> stacked(g.dim() + out, out);
  stacked.topRows(g.dim()) = g.cov.matrix().transpose() * cond.gain.transpose();
  stacked.bottomRows(out) = cond.noise.matrix().transpose();
  return {std::move(mean), Covariance<T>::factor(qr_r_factor<T>(stacked))};
}

template <typename T>
AffineConditional<T> compose_conditionals(const AffineConditional<T>& outer,
                                          const AffineConditional<T>& inner) {
  if (outer.input_dim() != inner.output_dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "cannot compose: outer input dimension " + std::to_string(outer.input_dim()) +
                    " vs inner output dimension " + std::to_string(inner.output_dim()));
  }
  // The noise of the composition is the marginal of `outer` against the
  // inner noise, so both parametrisations share marginalize's code path.
  Gaussian<T> pushed = marginalize(outer, Gaussian<T>{inner.offset, inner.noise});
  return {outer.gain * inner.gain, std::move(pushed.mean), std::move(pushed.cov)};
}

template <typename T>
BlockQrConditioning<T> condition_block_qr(const Matrix<T>& prior_factor,
                                          const Matrix<T>& obs_matrix,
                                          const Matrix<T>& noise_factor) {
  return block_qr_impl<T>(prior_factor, obs_matrix, noise_factor, ErrorKind::SingularInnovation);
}

template <typename T>
BlockQrConditioning<T> condition_block_qr(const Matrix<T>& prior_factor,
                                          const Matrix<T>& obs_matrix,
                                          const Matrix<T>& noise_factor,
                                          ErrorKind on_singular) {
  return block_qr_impl<T>(prior_factor, obs_matrix, noise_factor, on_singular);
}

template <typename T>
T log_density(const Gaussian<T>& g, const Vector<T>& y) {
  const Index n = g.dim();
  require_shape(y, n, 1, "evaluation point");
  if (n == 0) {
    return T(0);
  }
  Matrix<T> lower;
  if (g.cov.is_factor()) {
    lower = qr_r_factor<T>(g.cov.matrix().transpose());
  } else {
    Eigen::LLT<Matrix<T>> llt(g.cov.matrix());
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::SingularCovariance, "covariance is not positive definite");
    }
    lower = llt.matrixL();
  }
  const Vector<T> diag = lower.diagonal().cwiseAbs();
  if (!(diag.minCoeff() > Tolerance<T>::singular * diag.maxCoeff())) {
    throw Error(ErrorKind::SingularCovariance, "covariance factor has a vanishing diagonal");
  }
  const Vector<T> whitened =
      lower.template triangularView<Eigen::Lower>().solve(y - g.mean);
  const T log_det = T(2) * diag.array().log().sum();
  const T log_two_pi = std::log(T(2) * std::numbers::pi_v<T>);
  return T(-0.5) * (whitened.squaredNorm() + log_det + T(n) * log_two_pi);
}

#define FIXPOINT_INSTANTIATE(T)                                                               \
  template class Covariance<T>;                                                               \
  template struct AffineConditional<T>;                                                       \
  template Matrix<T> qr_r_factor<T>(const Matrix<T>&);                                        \
  template Covariance<T> to_factor<T>(const Covariance<T>&);                                  \
  template Covariance<T> to_dense<T>(const Covariance<T>&);                                   \
  template Covariance<T> to_rep<T>(const Covariance<T>&, Rep);                                \
  template Gaussian<T> to_rep<T>(const Gaussian<T>&, Rep);                                    \
  template Matrix<T> psd_projection_factor<T>(const Matrix<T>&);                              \
  template Gaussian<T> marginalize<T>(const AffineConditional<T>&, const Gaussian<T>&);       \
  template AffineConditional<T> compose_conditionals<T>(const AffineConditional<T>&,          \
                                                        const AffineConditional<T>&);         \
  template BlockQrConditioning<T> condition_block_qr<T>(const Matrix<T>&, const Matrix<T>&,   \
                                                        const Matrix<T>&);                    \
  template BlockQrConditioning<T> condition_block_qr<T>(const Matrix<T>&, const Matrix<T>&,   \
                                                        const Matrix<T>&, ErrorKind);         \
  template T log_density<T>(const Gaussian<T>&, const Vector<T>&);

FIXPOINT_INSTANTIATE(float)
FIXPOINT_INSTANTIATE(double)

#undef FIXPOINT_INSTANTIATE

}  // namespace fixpoint
