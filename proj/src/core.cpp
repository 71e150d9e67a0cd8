#include "igci/core.hpp"

#include "igci/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace igci {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

void require_probability_vector(std::span<const double> p, const char* name) {
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, std::string(name) + " has a negative or non-finite entry");
        }
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, std::string(name) + " does not sum to 1");
    }
}

}  // namespace

SamplePair::SamplePair(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size()) {
        throw Error(ErrorCode::InvalidArgument, "x and y have different lengths");
    }
    if (x_.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "a sample pair needs at least 3 observations");
    }
    if (!all_finite(x_) || !all_finite(y_)) {
        throw Error(ErrorCode::InvalidArgument, "sample contains NaN or infinity");
    }
}

MultiSample::MultiSample(Eigen::MatrixXd data) : data_(std::move(data)) {
    if (data_.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
    }
    if (!data_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "sample contains NaN or infinity");
    }
    if (data_.rows() <= data_.cols()) {
        throw Error(ErrorCode::SingularCovariance, "need more observations than dimensions");
    }
}

std::string_view to_string(ReferenceFamily ref) noexcept {
    switch (ref) {
        case ReferenceFamily::UniformUnit: return "uniform";
        case ReferenceFamily::Gaussian: return "gaussian";
        case ReferenceFamily::IsotropicGaussian: return "isotropic";
    }
    return "unknown";
}

std::string_view to_string(Direction dir) noexcept {
    switch (dir) {
        case Direction::XtoY: return "X->Y";
        case Direction::YtoX: return "Y->X";
        case Direction::Undecided: return "undecided";
    }
    return "unknown";
}

Direction flip(Direction dir) noexcept {
    switch (dir) {
        case Direction::XtoY: return Direction::YtoX;
        case Direction::YtoX: return Direction::XtoY;
        case Direction::Undecided: return Direction::Undecided;
    }
    return Direction::Undecided;
}

Direction direction_from_score(double score, double tol) noexcept {
    if (score < -tol) return Direction::XtoY;
    if (score > tol) return Direction::YtoX;
    return Direction::Undecided;
}

UniformNormalized normalize_uniform(std::span<const double> values) {
    if (values.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "need at least 2 values to normalize");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double min = *lo;
    const double range = *hi - min;
    if (!(range > 0.0)) {
        throw Error(ErrorCode::ConstantInput, "variable is constant");
    }
    UniformNormalized out;
    out.scale = range;
    out.offset = min;
    out.values.reserve(values.size());
    for (double v : values) out.values.push_back((v - min) / range);
    return out;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "mean of empty sequence");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
    const double mu = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    return ss / static_cast<double>(values.size());
}

GaussianStandardized standardize_gaussian(std::span<const double> values) {
    if (values.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "need at least 2 values to standardize");
    }
    GaussianStandardized out;
    out.mean = mean(values);
    const double var = variance(values);
    if (!(var > 0.0)) {
        throw Error(ErrorCode::ConstantInput, "variable has zero variance");
    }
    out.std = std::sqrt(var);
    out.values.reserve(values.size());
    for (double v : values) out.values.push_back((v - out.mean) / out.std);
    return out;
}

Eigen::VectorXd column_mean(const Eigen::MatrixXd& data) { return data.colwise().mean().transpose(); }

Eigen::MatrixXd covariance(const Eigen::MatrixXd& data) {
    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    return (centered.transpose() * centered) / static_cast<double>(data.rows());
}

Whitened whiten(const MultiSample& sample) {
    Whitened out;
    out.mean = column_mean(sample.data());
    const Eigen::MatrixXd centered = sample.data().rowwise() - out.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(sample.rows());

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularCovariance, "eigendecomposition failed");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double largest = lambda.cwiseAbs().maxCoeff();
    if (!(lambda.minCoeff() > largest * 1e-13) || !(largest > 0.0)) {
        throw Error(ErrorCode::SingularCovariance, "empirical covariance is singular");
    }
    out.transform = eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                    eig.eigenvectors().transpose();
    out.data = centered * out.transform;
    return out;
}

double digamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::DomainError, "digamma requires a finite positive argument");
    }
    // Shift upward until the asymptotic series converges to double precision.
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number series: sum B_{2k} / (2k x^{2k}), k = 1..7.
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 -
                                                inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
    return shift + std::log(x) - 0.5 * inv - series;
}

double discrete_kl(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw Error(ErrorCode::DimensionMismatch, "probability vectors differ in length");
    }
    require_probability_vector(p, "p");
    require_probability_vector(q, "q");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) {
            throw Error(ErrorCode::SupportMismatch, "q vanishes where p is positive");
        }
        kl += p[i] * std::log(p[i] / q[i]);
    }
    // Rounding can leave a tiny negative value for p == q.
    return std::max(kl, 0.0);
}

OrthogonalityDefect orthogonality_defect(std::span<const double> q, std::span<const double> r,
                                         std::span<const double> s) {
    if (q.size() != r.size() || q.size() != s.size()) {
        throw Error(ErrorCode::DimensionMismatch, "densities differ in length");
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
        const bool pq = q[i] > 0.0, pr = r[i] > 0.0, ps = s[i] > 0.0;
        if (pq != pr || pq != ps) {
            throw Error(ErrorCode::SupportMismatch, "densities do not share a common support");
        }
    }
    double cross_q = 0.0, cross_r = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0.0) continue;
        const double log_rs = std::log(r[i] / s[i]);
        cross_q += q[i] * log_rs;
        cross_r += r[i] * log_rs;
    }
    OrthogonalityDefect out;
    out.kl_defect = discrete_kl(q, s) - discrete_kl(q, r) - discrete_kl(r, s);
    out.cross_term_defect = cross_q - cross_r;
    return out;
}

}  // namespace igci
