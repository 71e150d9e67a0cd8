#pragma once

// Monte-Carlo harness for synthetic cause-effect pairs: input densities, monotone
// mechanisms, additive noise, accuracy grids, and the Gaussian-smoothing entropy bound.

#include "igci/core.hpp"
#include "igci/estimators.hpp"
#include "igci/rng.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace igci::sim {

enum class InputKind {
    UniformUnit,    // (A) U(0, 1)
    GaussAtZero,    // (B) N(0, sigma^2)
    GaussCentered,  // (C) N(0.5, sigma^2)
    GaussAtOne,     // (D) N(1, sigma^2)
    GaussMixture,   // (E) equal mixture of N(0.3, (sigma/2)^2) and N(0.7, (sigma/2)^2)
    StdNormal,      // N(0, 1)
};

struct InputDist {
    InputKind kind = InputKind::UniformUnit;
    double sigma = 0.2;
    /// Restrict to [0, 1] by rejection, keeping the density continuous.
    bool truncate = true;
};

/// The five grid rows in order A..E with the given width, truncated to [0, 1].
[[nodiscard]] std::array<InputDist, 5> grid_inputs(double sigma = 0.2);
/// The inputs of the small-fluctuation experiment; not truncated.
[[nodiscard]] std::vector<InputDist> sine_inputs(double sigma = 0.2);

[[nodiscard]] std::string label(const InputDist& dist);

inline constexpr std::size_t kMaxConsecutiveRejections = 1'000'000;

/// Draws m values. Throws SamplingStalled if truncation rejects 10^6 draws in a row.
[[nodiscard]] std::vector<double> sample_input(const InputDist& dist, std::size_t m, CounterRng& rng);
[[nodiscard]] std::vector<double> sample_input(const InputDist& dist, std::size_t m, std::uint64_t seed);

enum class MechanismKind { PowerThird, SqrtPow, Square, Cube, CdfMix };

struct CdfComponent {
    double alpha = 1.0;
    double mu = 0.5;
    double sigma = 0.05;
};

struct MechanismSpec {
    MechanismKind kind = MechanismKind::PowerThird;
    /// Only for CdfMix: convex combination of Gaussian CDFs.
    std::vector<CdfComponent> components;

    [[nodiscard]] static MechanismSpec power_third() { return {MechanismKind::PowerThird, {}}; }
    [[nodiscard]] static MechanismSpec sqrt_pow() { return {MechanismKind::SqrtPow, {}}; }
    [[nodiscard]] static MechanismSpec square() { return {MechanismKind::Square, {}}; }
    [[nodiscard]] static MechanismSpec cube() { return {MechanismKind::Cube, {}}; }
    /// Throws InvalidArgument unless weights are non-negative and sum to 1 and widths are positive.
    [[nodiscard]] static MechanismSpec cdf_mix(std::vector<CdfComponent> components);
};

inline constexpr double kMinCdfWidth = 1e-4;

/// n components with alpha ~ U(0,1) normalized to sum 1, mu ~ U(0,1), sigma ~ U(0, 0.1)
/// floored at kMinCdfWidth.
[[nodiscard]] MechanismSpec random_cdf_mix(CounterRng& rng, std::size_t n = 5);

[[nodiscard]] char label(const MechanismSpec& spec);

/// Gaussian CDF via erfc.
[[nodiscard]] double normal_cdf(double x, double mu, double sigma);

[[nodiscard]] double apply_mechanism(const MechanismSpec& spec, double x);
[[nodiscard]] std::vector<double> apply_mechanism(const MechanismSpec& spec, std::span<const double> x);

enum class NoiseKind { None, UniformUnit, StdNormal, Laplace };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double lambda = 0.0;
    /// Scale of Lap(0, b).
    double laplace_scale = 0.2;
};

[[nodiscard]] std::string_view to_string(NoiseKind kind) noexcept;

/// Adds lambda * E in place.
void add_noise(std::span<double> y, const NoiseSpec& noise, CounterRng& rng);

struct CellTally {
    std::size_t correct = 0;
    std::size_t wrong = 0;
    std::size_t undecided = 0;  // includes estimator errors

    [[nodiscard]] std::size_t total() const noexcept { return correct + wrong + undecided; }
    [[nodiscard]] double accuracy_pct() const noexcept {
        return total() == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total());
    }
};

struct GridConfig {
    NoiseSpec noise;
    std::size_t m = 1000;
    std::size_t repetitions = 100;
    EstimatorKind estimator = EstimatorKind::EntropySpacing;
    ReferenceFamily reference = ReferenceFamily::UniformUnit;
    std::uint64_t seed = 1;
    double sigma = 0.2;
    /// Score (y, x) instead of (x, y); ground truth is still X -> Y.
    bool reversed_roles = false;
    /// Worker threads; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

struct SimGridResult {
    GridConfig config;
    /// Row-major: cells[input * 5 + mechanism].
    std::array<CellTally, 25> cells{};

    [[nodiscard]] const CellTally& cell(std::size_t input, std::size_t mechanism) const {
        return cells.at(input * 5 + mechanism);
    }
};

/// Runs one synthetic pair and scores it. The stream identifies (cell, repetition).
[[nodiscard]] Direction run_trial(const InputDist& input, std::size_t mechanism, const GridConfig& config,
                                  CounterRng& rng);

/// All 25 (input, mechanism) cells, each repeated with fresh mechanism parameters.
[[nodiscard]] SimGridResult run_grid(const GridConfig& config);

struct SineConfig {
    double epsilon = 0.005;
    double omega = 40.0;
    std::vector<InputDist> inputs = sine_inputs();
    std::size_t m = 1000;
    std::size_t repetitions = 100;
    EstimatorKind estimator = EstimatorKind::EntropySpacing;
    ReferenceFamily reference = ReferenceFamily::UniformUnit;
    std::uint64_t seed = 1;
};

struct SineResult {
    InputDist input;
    CellTally tally;
};

/// Y = X + epsilon sin(omega X). Requires |epsilon * omega| < 1 so the map stays monotone.
[[nodiscard]] std::vector<SineResult> run_sine(const SineConfig& config);

struct FisherEstimate {
    double value = 0.0;      // deconvolved estimate of J(X)
    double smoothed = 0.0;   // J of the kernel-smoothed density
    double bandwidth = 0.0;
};

/// Fisher information of the density behind `values`. The Gaussian-kernel density at the
/// Silverman bandwidth h is binned on a fine grid and J of the smoothed density is integrated;
/// smoothing adds h^2 to 1/J for Gaussian data (Stam's inequality is tight there), so that
/// term is removed. For non-Gaussian data the result is still a lower estimate.
[[nodiscard]] FisherEstimate estimate_fisher_information(std::span<const double> values);

struct NoiseBoundLevel {
    double sigma = 0.0;
    double entropy_noisy = 0.0;  // estimate of S(X + sqrt(sigma) Z)
    double bound = 0.0;          // S(X) + 0.5 log(sigma J(X) + 1)
    double slack = 0.0;          // bound - entropy_noisy
    bool holds = false;          // slack >= -tolerance
};

struct NoiseBoundReport {
    double entropy_x = 0.0;
    FisherEstimate fisher;
    std::vector<NoiseBoundLevel> levels;
};

inline constexpr double kNoiseBoundTolerance = 0.05;

/// Checks the Gaussian-smoothing entropy bound at each level using spacing entropies.
[[nodiscard]] NoiseBoundReport verify_noise_bound(std::span<const double> x, std::span<const double> sigma_levels,
                                                  std::uint64_t seed, double tolerance = kNoiseBoundTolerance);

/// Largest noise variance for which S(Y + sqrt(sigma) E) stays below S(X):
/// (exp(2 S(X) - 2 S(Y)) - 1) / J(Y).
[[nodiscard]] double entropy_preserving_noise_limit(double entropy_x, double entropy_y, double fisher_y);

}  // namespace igci::sim
