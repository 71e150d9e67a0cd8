#include "igci/trace_method.hpp"

#include "igci/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace igci::trace {

namespace {

void require_square(const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, std::string(name) + " must be a non-empty square matrix");
    }
}

double log_tau(const Eigen::MatrixXd& m) {
    const double t = renorm_trace(m);
    if (!(t > 0.0)) {
        throw Error(ErrorCode::NonPositiveTrace, "renormalized trace is not positive");
    }
    return std::log(t);
}

double condition_number(const Eigen::MatrixXd& a) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const Eigen::VectorXd& s = svd.singularValues();
    const double smallest = s(s.size() - 1);
    return smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
}

}  // namespace

double renorm_trace(const Eigen::MatrixXd& b) {
    require_square(b, "matrix");
    return b.trace() / static_cast<double>(b.rows());
}

double delta(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma_x) {
    require_square(a, "A");
    require_square(sigma_x, "covariance");
    if (a.rows() != sigma_x.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "A and covariance dimensions differ");
    }
    const Eigen::MatrixXd image = a * sigma_x * a.transpose();
    return log_tau(image) - log_tau(a * a.transpose()) - log_tau(sigma_x);
}

double kl_to_isotropic(const Eigen::MatrixXd& sigma) {
    require_square(sigma, "covariance");
    if (!sigma.isApprox(sigma.transpose(), 1e-10)) {
        throw Error(ErrorCode::NotPositiveDefinite, "covariance is not symmetric");
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.vectorD().minCoeff() > 0.0)) {
        throw Error(ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
    }
    const double log_det = ldlt.vectorD().array().log().sum();
    const double d = static_cast<double>(sigma.rows());
    // AM-GM on the eigenvalues makes this non-negative; clip rounding noise.
    return std::max(0.0, 0.5 * (d * log_tau(sigma) - log_det));
}

double kl_image_to_isotropic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma_x) {
    require_square(a, "A");
    const Eigen::MatrixXd image = renorm_trace(sigma_x) * (a * a.transpose());
    return kl_to_isotropic(0.5 * (image + image.transpose()));
}

LinearModel fit_linear(const MultiSample& x, const MultiSample& y, const LinearFitOptions& options) {
    if (x.rows() != y.rows() || x.dim() != y.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "x and y must have the same number of rows and columns");
    }
    const Eigen::MatrixXd xc = x.data().rowwise() - x.data().colwise().mean();
    const Eigen::MatrixXd yc = y.data().rowwise() - y.data().colwise().mean();

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    if (qr.rank() < xc.cols()) {
        throw Error(ErrorCode::SingularFit, "least-squares system is rank deficient");
    }
    // yc = xc * A^T
    const Eigen::MatrixXd a_t = qr.solve(yc);

    LinearModel model;
    model.a = a_t.transpose();
    if (!(condition_number(model.a) < options.max_condition)) {
        throw Error(ErrorCode::SingularFit, "fitted matrix is numerically singular");
    }
    const double scale = yc.norm();
    model.relative_residual = scale > 0.0 ? (yc - xc * a_t).norm() / scale : 0.0;
    model.sigma_x = covariance(x.data());
    model.sigma_y = covariance(y.data());
    return model;
}

LinearDirectionResult infer_linear_direction(const MultiSample& x, const MultiSample& y,
                                             const LinearFitOptions& options) {
    const LinearModel model = fit_linear(x, y, options);

    Eigen::MatrixXd reverse;
    if (options.refit_reverse) {
        reverse = fit_linear(y, x, options).a;
    } else {
        reverse = model.a.inverse();
    }

    LinearDirectionResult out;
    out.delta_xy = delta(model.a, model.sigma_x);
    out.delta_yx = delta(reverse, model.sigma_y);
    out.relative_residual = model.relative_residual;
    out.nonlinear_warning = model.relative_residual > options.residual_warning;
    out.direction = direction_from_score(std::abs(out.delta_xy) - std::abs(out.delta_yx));
    return out;
}

}  // namespace igci::trace
