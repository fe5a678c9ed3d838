#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "cmdist/error.hpp"

namespace cmdist {

enum class SolverMode {
    /// LDLT factorization; a covariance that is not numerically positive
    /// definite raises SingularityError.
    strict,
    /// Eigendecomposition; eigenvalues below `kPinvCutoff * max` are dropped.
    pseudoinverse,
};

struct SolverOptions {
    SolverMode mode = SolverMode::strict;
    /// Added to the diagonal before factorization.
    double ridge = 0.0;
};

inline constexpr double kPinvCutoff = 1e-10;
/// Smallest LDLT pivot, relative to the largest, accepted in strict mode.
inline constexpr double kStrictPivotCutoff = 1e-12;
/// Negative quadratic forms down to this are treated as roundoff.
inline constexpr double kRadicandSlack = 1e-12;

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!m.allFinite()) {
        throw ValidationError(std::string(what) + " contains NaN or Inf");
    }
}

/// Square root of a quadratic form, clamping roundoff-sized negatives to 0.
template <typename Scalar>
Scalar checked_sqrt(Scalar q) {
    if (q < Scalar(0)) {
        if (q >= Scalar(-kRadicandSlack)) return Scalar(0);
        throw NumericalError("negative quadratic form " + std::to_string(static_cast<double>(q)));
    }
    return std::sqrt(q);
}

/// Factors a covariance matrix once and evaluates x^T C^-1 x (or the
/// pseudoinverse form) for many vectors x.
template <typename Scalar = double>
class MahalanobisForm {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    template <typename Derived>
    explicit MahalanobisForm(const Eigen::MatrixBase<Derived>& cov, SolverOptions opts = {}) : opts_(opts) {
        if (cov.rows() != cov.cols()) {
            throw DimensionError("covariance matrix is not square");
        }
        require_finite(cov, "covariance matrix");
        if (!(opts.ridge >= 0.0)) {
            throw ValidationError("ridge must be nonnegative");
        }
        Matrix c = cov;
        const Scalar scale = c.cwiseAbs().maxCoeff();
        if ((c - c.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * (Scalar(1) + scale)) {
            throw ValidationError("covariance matrix is not symmetric");
        }
        c = (c + c.transpose()) / Scalar(2);
        c.diagonal().array() += Scalar(opts.ridge);
        n_ = c.rows();
        if (n_ == 0) return;

        if (opts.mode == SolverMode::strict) {
            ldlt_.compute(c);
            const Vector d = ldlt_.vectorD();
            const Scalar dmax = d.maxCoeff();
            const Scalar dmin = d.minCoeff();
            if (ldlt_.info() != Eigen::Success || !(dmax > Scalar(0)) ||
                dmin <= Scalar(kStrictPivotCutoff) * dmax) {
                throw SingularityError("covariance matrix is singular or not positive definite",
                                       static_cast<double>(dmin));
            }
        } else {
            Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
            if (eig.info() != Eigen::Success) {
                throw NumericalError("eigendecomposition of the covariance matrix failed");
            }
            const Vector& lambda = eig.eigenvalues();
            const Scalar lmax = lambda.cwiseAbs().maxCoeff();
            const Scalar cutoff = Scalar(kPinvCutoff) * lmax;
            // whitening: q = ||W^T x||^2 with W = V diag(lambda^-1/2) over kept eigenvalues
            Eigen::Index kept = 0;
            for (Eigen::Index i = 0; i < lambda.size(); ++i) {
                if (lambda[i] > cutoff) ++kept;
            }
            whitening_.resize(n_, kept);
            Eigen::Index col = 0;
            for (Eigen::Index i = 0; i < lambda.size(); ++i) {
                if (lambda[i] > cutoff) {
                    whitening_.col(col++) = eig.eigenvectors().col(i) / std::sqrt(lambda[i]);
                }
            }
            rank_ = kept;
        }
        if (opts.mode == SolverMode::strict) rank_ = n_;
    }

    Eigen::Index dimension() const noexcept { return n_; }
    Eigen::Index rank() const noexcept { return rank_; }
    const SolverOptions& options() const noexcept { return opts_; }

    /// x^T C^-1 x; may be slightly negative from roundoff.
    template <typename Derived>
    Scalar squared(const Eigen::MatrixBase<Derived>& x) const {
        if (x.size() != n_) {
            throw DimensionError("vector of length " + std::to_string(x.size()) +
                                 " does not match covariance dimension " + std::to_string(n_));
        }
        require_finite(x, "frequency difference");
        if (n_ == 0) return Scalar(0);
        if (opts_.mode == SolverMode::strict) {
            const Vector y = ldlt_.solve(x.template cast<Scalar>());
            return x.template cast<Scalar>().dot(y);
        }
        return (whitening_.transpose() * x.template cast<Scalar>()).squaredNorm();
    }

    template <typename Derived>
    Scalar distance(const Eigen::MatrixBase<Derived>& x) const {
        return checked_sqrt(squared(x));
    }

private:
    SolverOptions opts_;
    Eigen::Index n_ = 0;
    Eigen::Index rank_ = 0;
    Eigen::LDLT<Matrix> ldlt_;
    Matrix whitening_;
};

template <typename Derived>
MahalanobisForm(const Eigen::MatrixBase<Derived>&, SolverOptions) -> MahalanobisForm<typename Derived::Scalar>;

/// sqrt((a - b)^T C^-1 (a - b)) for a single pair.
template <typename A, typename B, typename C>
typename C::Scalar mahalanobis_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                                        const Eigen::MatrixBase<C>& cov, SolverOptions opts = {}) {
    if (a.size() != b.size()) {
        throw DimensionError("frequency vectors have different lengths");
    }
    require_finite(a, "frequency vector");
    require_finite(b, "frequency vector");
    return MahalanobisForm<typename C::Scalar>(cov, opts).distance(a - b);
}

}  // namespace cmdist
