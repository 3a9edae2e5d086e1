#pragma once

// Shared aliases, numeric constants, and small linear-algebra helpers used
// across the library.

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace onebit {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

/// Thrown when an input violates a documented precondition.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical operation cannot be completed reliably.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw invalid_input(msg);
}

/// Relative ridge magnitude used when a nominally positive definite matrix
/// fails to factor: ridge = kRidgeScale * trace(A) / dim(A), applied once.
inline constexpr double kRidgeScale = 1e-10;

namespace detail {

template <typename Mat>
Mat solve_hpd_impl(const Mat& A, const Mat& B, const char* what) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() == Eigen::Success) return llt.solve(B);
  Mat Aj = A;
  const double ridge =
      kRidgeScale * std::abs(std::real(Aj.trace())) / static_cast<double>(Aj.rows());
  Aj.diagonal().array() += ridge;
  Eigen::LLT<Mat> llt2(Aj);
  if (llt2.info() == Eigen::Success) return llt2.solve(B);
  throw numerical_error(std::string(what) +
                        ": matrix is not positive definite even after adding a "
                        "diagonal ridge of " +
                        std::to_string(ridge));
}

}  // namespace detail

/// Solve A X = B for Hermitian positive definite A (Cholesky). If the
/// factorization fails, a single relative ridge is added to the diagonal and
/// the solve is retried; a second failure raises numerical_error.
inline MatC solve_hpd(const MatC& A, const MatC& B, const char* what = "solve_hpd") {
  return detail::solve_hpd_impl<MatC>(A, B, what);
}

inline MatR solve_spd(const MatR& A, const MatR& B, const char* what = "solve_spd") {
  return detail::solve_hpd_impl<MatR>(A, B, what);
}

/// Kronecker product (dense, small operands).
template <typename MatA, typename MatB>
auto kron(const MatA& A, const MatB& B) {
  using Scalar = decltype(typename MatA::Scalar{} * typename MatB::Scalar{});
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> K(A.rows() * B.rows(),
                                                          A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

}  // namespace onebit
