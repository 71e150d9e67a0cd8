#pragma once

// Domain types, reference-measure preprocessing and shared numeric helpers.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace igci {

/// Paired scalar observations (x_i, y_i). Construction validates the pairing.
class SamplePair {
public:
    /// Throws InvalidArgument unless sizes match, m >= 3 and every value is finite.
    SamplePair(std::vector<double> x, std::vector<double> y);

    [[nodiscard]] std::span<const double> x() const noexcept { return x_; }
    [[nodiscard]] std::span<const double> y() const noexcept { return y_; }
    [[nodiscard]] std::size_t size() const noexcept { return x_.size(); }

    /// The same observations with the roles of x and y exchanged.
    [[nodiscard]] SamplePair swapped() const { return SamplePair(y_, x_); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
};

/// m observations of a d-dimensional vector, one observation per row.
class MultiSample {
public:
    /// Throws InvalidArgument on non-finite entries and SingularCovariance when m <= d.
    explicit MultiSample(Eigen::MatrixXd data);

    [[nodiscard]] const Eigen::MatrixXd& data() const noexcept { return data_; }
    [[nodiscard]] Eigen::Index rows() const noexcept { return data_.rows(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return data_.cols(); }

private:
    Eigen::MatrixXd data_;
};

enum class ReferenceFamily { UniformUnit, Gaussian, IsotropicGaussian };

enum class Direction { XtoY, YtoX, Undecided };

/// Scores with magnitude at or below this are ties.
inline constexpr double kUndecidedTolerance = 1e-12;

[[nodiscard]] std::string_view to_string(ReferenceFamily ref) noexcept;
[[nodiscard]] std::string_view to_string(Direction dir) noexcept;
[[nodiscard]] Direction flip(Direction dir) noexcept;

/// Negative score means X -> Y.
[[nodiscard]] Direction direction_from_score(double score, double tol = kUndecidedTolerance) noexcept;

struct UniformNormalized {
    std::vector<double> values;
    double scale = 1.0;   // max - min
    double offset = 0.0;  // min
};

struct GaussianStandardized {
    std::vector<double> values;
    double mean = 0.0;
    double std = 1.0;  // population (1/m) convention
};

/// Affine map onto [0, 1] with min -> 0 and max -> 1 exactly.
[[nodiscard]] UniformNormalized normalize_uniform(std::span<const double> values);

/// Affine map to mean 0 and population variance 1.
[[nodiscard]] GaussianStandardized standardize_gaussian(std::span<const double> values);

[[nodiscard]] double mean(std::span<const double> values);
/// Population variance (divides by m).
[[nodiscard]] double variance(std::span<const double> values);

/// Column means and population covariance (1/m) of the rows of `data`.
[[nodiscard]] Eigen::VectorXd column_mean(const Eigen::MatrixXd& data);
[[nodiscard]] Eigen::MatrixXd covariance(const Eigen::MatrixXd& data);

struct Whitened {
    Eigen::MatrixXd data;       // centered and whitened rows
    Eigen::MatrixXd transform;  // symmetric inverse square root of the covariance
    Eigen::VectorXd mean;
};

/// Symmetric (ZCA) whitening: rows become (x - mean) * C^{-1/2}.
[[nodiscard]] Whitened whiten(const MultiSample& sample);

/// Logarithmic derivative of the gamma function, for x > 0.
[[nodiscard]] double digamma(double x);

/// Sum p_i log(p_i / q_i), with 0 log 0 = 0.
[[nodiscard]] double discrete_kl(std::span<const double> p, std::span<const double> q);

/// Both sides of the orthogonality identity for discrete densities q, r, s:
/// D(q||s) - D(q||r) - D(r||s) and sum q log(r/s) - sum r log(r/s).
/// The two are equal for any triple on a common support.
struct OrthogonalityDefect {
    double kl_defect = 0.0;
    double cross_term_defect = 0.0;
};

[[nodiscard]] OrthogonalityDefect orthogonality_defect(std::span<const double> q,
                                                       std::span<const double> r,
                                                       std::span<const double> s);

}  // namespace igci
