#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace relaypower {

/// Throws std::invalid_argument with the given message when cond is false.
/// Used for caller-contract violations (bad sizes, non-positive powers, ...).
inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& a) {
    return a.allFinite();
}

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
    return 0.5 * (a + a.transpose());
}

/// Verifies a is symmetric up to a relative infinity-norm tolerance.
inline void check_symmetric(const Eigen::MatrixXd& a, const std::string& what,
                            double rel_tol = 1e-10) {
    require(a.rows() == a.cols(), what + " must be square");
    const double scale = a.cwiseAbs().maxCoeff() + std::numeric_limits<double>::min();
    const double skew = (a - a.transpose()).cwiseAbs().maxCoeff();
    require(skew <= rel_tol * scale, what + " must be symmetric");
}

/// Verifies the smallest eigenvalue of a symmetric matrix is above
/// -rel_tol * max|eigenvalue|.  Small negative eigenvalues from round-off
/// are accepted; genuinely indefinite matrices are rejected.
inline void check_psd(const Eigen::MatrixXd& a, const std::string& what,
                      double rel_tol = 1e-10) {
    check_symmetric(a, what);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(a),
                                                      Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double top = std::max(ev.cwiseAbs().maxCoeff(),
                                std::numeric_limits<double>::min());
    if (ev.minCoeff() < -rel_tol * top) {
        std::ostringstream os;
        os << what << " is not positive semidefinite (min eigenvalue "
           << ev.minCoeff() << ", max magnitude " << top << ")";
        throw std::invalid_argument(os.str());
    }
}

/// Cholesky-backed solver for symmetric positive definite systems.
/// Construction throws std::runtime_error with a condition-number estimate
/// when the matrix is indefinite, singular, or numerically unusable.
class SpdSolver {
public:
    SpdSolver(const Eigen::MatrixXd& a, const std::string& what) {
        if (a.rows() != a.cols() || a.rows() == 0)
            throw std::invalid_argument(what + " must be square and non-empty");
        llt_.compute(a);
        rcond_ = (llt_.info() == Eigen::Success) ? llt_.rcond() : 0.0;
        if (llt_.info() != Eigen::Success || !(rcond_ > 1e-16) ||
            !std::isfinite(rcond_)) {
            std::ostringstream os;
            os << what << " is singular or not positive definite"
               << " (reciprocal condition estimate " << rcond_ << ")";
            throw std::runtime_error(os.str());
        }
    }

    template <typename Derived>
    auto solve(const Eigen::MatrixBase<Derived>& b) const {
        return llt_.solve(b).eval();
    }

    Eigen::MatrixXd inverse() const {
        const Eigen::Index n = llt_.matrixL().rows();
        return llt_.solve(Eigen::MatrixXd::Identity(n, n));
    }

    double rcond() const { return rcond_; }

private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double rcond_ = 0.0;
};

/// Symmetric PSD square root via eigendecomposition; negative round-off
/// eigenvalues are clamped to zero.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(a));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace relaypower
