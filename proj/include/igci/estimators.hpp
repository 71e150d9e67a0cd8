#pragma once

#include "igci/core.hpp"

#include <cstddef>
#include <span>
#include <string_view>

namespace igci {

enum class EstimatorKind { EntropySpacing, SlopeIntegral };

[[nodiscard]] std::string_view to_string(EstimatorKind kind) noexcept;

struct IgciReport {
    /// Decision statistic: negative means X -> Y.
    double c_xy = 0.0;
    double c_yx = 0.0;
    Direction direction = Direction::Undecided;
    EstimatorKind estimator = EstimatorKind::EntropySpacing;
    ReferenceFamily reference = ReferenceFamily::UniformUnit;
    /// One more than the number of spacing (or slope) terms that survived tie-dropping,
    /// taking the smaller of the two directions.
    std::size_t m_used = 0;
};

/// Result of the 1-D spacing entropy estimate, with the count of non-zero spacings.
struct SpacingEntropy {
    double value = 0.0;
    std::size_t terms = 0;
};

/// psi(m) - psi(1) + mean of log spacings of the sorted sample. Zero spacings are
/// skipped and the mean is taken over the remaining ones. Throws AllTied.
[[nodiscard]] SpacingEntropy spacing_entropy_detail(std::span<const double> values);
[[nodiscard]] double spacing_entropy(std::span<const double> values);

struct SlopeEstimate {
    double value = 0.0;
    std::size_t terms = 0;
};

/// Mean of log|dy/dx| over consecutive points after sorting by x (ties by y).
/// Terms with dx == 0 or dy == 0 are skipped. Throws NoValidSpacings.
[[nodiscard]] SlopeEstimate slope_criterion_detail(std::span<const double> x, std::span<const double> y);
[[nodiscard]] double slope_criterion(std::span<const double> x, std::span<const double> y);
[[nodiscard]] double slope_criterion(const SamplePair& pair);

/// Full pipeline: preprocess both variables for `reference`, estimate the score, decide.
/// IsotropicGaussian is rejected with InvalidReference.
[[nodiscard]] IgciReport igci_score(const SamplePair& pair, ReferenceFamily reference, EstimatorKind estimator,
                                    double tie_tolerance = kUndecidedTolerance);

/// Difference between the Gaussian-reference and uniform-reference scores for `pair`.
/// Computed from ranges and standard deviations only; equals
/// log(sigma_x / range_x) - log(sigma_y / range_y).
[[nodiscard]] double reference_shift(const SamplePair& pair);

}  // namespace igci
