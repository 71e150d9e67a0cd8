#pragma once

// Isotropic-Gaussian reference for linear relations Y = A X.

#include "igci/core.hpp"

#include <Eigen/Dense>

namespace igci::trace {

/// tr(B) / d.
[[nodiscard]] double renorm_trace(const Eigen::MatrixXd& b);

/// log tau(A S A^T) - log tau(A A^T) - log tau(S). Zero when A and S are "independent".
[[nodiscard]] double delta(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma_x);

/// KL divergence from N(mu, S) to its projection onto isotropic Gaussians:
/// 0.5 * (d log tau(S) - log det S).
[[nodiscard]] double kl_to_isotropic(const Eigen::MatrixXd& sigma);

/// Distance of the isotropic projection u = N(mu, tau(S) I) of the input from the
/// family A^{-1} E_Y. Relative entropy is invariant under the bijection A, so this is
/// the distance of N(A mu, tau(S) A A^T) from the isotropic family, i.e.
/// kl_to_isotropic(tau(S) A A^T); the scale tau(S) cancels.
[[nodiscard]] double kl_image_to_isotropic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma_x);

struct LinearModel {
    Eigen::MatrixXd a;
    Eigen::MatrixXd sigma_x;
    Eigen::MatrixXd sigma_y;
    double relative_residual = 0.0;

    [[nodiscard]] Eigen::Index dim() const noexcept { return a.rows(); }
};

struct LinearFitOptions {
    double max_condition = 1e12;
    /// Above this relative residual the relation is flagged as not linear.
    double residual_warning = 0.05;
    /// Fit the reverse model by regressing x on y instead of inverting the forward fit.
    bool refit_reverse = false;
};

/// Ordinary least squares of centered y on centered x, rows as observations.
/// Throws DimensionMismatch or SingularFit.
[[nodiscard]] LinearModel fit_linear(const MultiSample& x, const MultiSample& y,
                                     const LinearFitOptions& options = {});

struct LinearDirectionResult {
    Direction direction = Direction::Undecided;
    double delta_xy = 0.0;
    double delta_yx = 0.0;
    double relative_residual = 0.0;
    bool nonlinear_warning = false;
};

/// Prefers the direction whose delta is closer to zero.
[[nodiscard]] LinearDirectionResult infer_linear_direction(const MultiSample& x, const MultiSample& y,
                                                           const LinearFitOptions& options = {});

}  // namespace igci::trace
