#include "igci/simulation.hpp"

#include "igci/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace igci::sim {

namespace {

constexpr std::uint64_t kGridStream = 1;
constexpr std::uint64_t kSineStream = 2;
constexpr std::uint64_t kNoiseBoundStream = 3;

double draw_untruncated(const InputDist& dist, CounterRng& rng) {
    switch (dist.kind) {
        case InputKind::UniformUnit: return rng.uniform();
        case InputKind::GaussAtZero: return rng.normal(0.0, dist.sigma);
        case InputKind::GaussCentered: return rng.normal(0.5, dist.sigma);
        case InputKind::GaussAtOne: return rng.normal(1.0, dist.sigma);
        case InputKind::GaussMixture: {
            const double mu = rng.uniform() < 0.5 ? 0.3 : 0.7;
            return rng.normal(mu, 0.5 * dist.sigma);
        }
        case InputKind::StdNormal: return rng.normal();
    }
    return 0.0;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MechanismSpec grid_mechanism(std::size_t index, CounterRng& rng) {
    switch (index) {
        case 0: return MechanismSpec::power_third();
        case 1: return MechanismSpec::sqrt_pow();
        case 2: return MechanismSpec::square();
        case 3: return MechanismSpec::cube();
        case 4: return random_cdf_mix(rng);
        default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "mechanism index out of range");
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::array<InputDist, 5> grid_inputs(double sigma) {
    return {InputDist{InputKind::UniformUnit, sigma, true}, InputDist{InputKind::GaussAtZero, sigma, true},
            InputDist{InputKind::GaussCentered, sigma, true}, InputDist{InputKind::GaussAtOne, sigma, true},
            InputDist{InputKind::GaussMixture, sigma, true}};
}

std::vector<InputDist> sine_inputs(double sigma) {
    return {InputDist{InputKind::StdNormal, sigma, false}, InputDist{InputKind::GaussAtZero, sigma, false},
            InputDist{InputKind::GaussCentered, sigma, false}, InputDist{InputKind::GaussAtOne, sigma, false},
            InputDist{InputKind::GaussMixture, sigma, false}};
}

std::string label(const InputDist& dist) {
    switch (dist.kind) {
        case InputKind::UniformUnit: return "A";
        case InputKind::GaussAtZero: return "B";
        case InputKind::GaussCentered: return "C";
        case InputKind::GaussAtOne: return "D";
        case InputKind::GaussMixture: return "E";
        case InputKind::StdNormal: return "N01";
    }
    return "?";
}

std::vector<double> sample_input(const InputDist& dist, std::size_t m, CounterRng& rng) {
    if (!(dist.sigma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "input width must be positive");
    }
    std::vector<double> out;
    out.reserve(m);
    std::size_t rejected = 0;
    while (out.size() < m) {
        const double v = draw_untruncated(dist, rng);
        if (dist.truncate && (v < 0.0 || v > 1.0)) {
            if (++rejected >= kMaxConsecutiveRejections) {
                throw Error(ErrorCode::SamplingStalled, "truncation rejected too many draws in a row");
            }
            continue;
        }
        rejected = 0;
        out.push_back(v);
    }
    return out;
}

std::vector<double> sample_input(const InputDist& dist, std::size_t m, std::uint64_t seed) {
    CounterRng rng(seed);
    return sample_input(dist, m, rng);
}

MechanismSpec MechanismSpec::cdf_mix(std::vector<CdfComponent> components) {
    if (components.empty()) {
        throw Error(ErrorCode::InvalidArgument, "CDF mixture needs at least one component");
    }
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.alpha >= 0.0) || !(c.sigma > 0.0) || !std::isfinite(c.mu)) {
            throw Error(ErrorCode::InvalidArgument, "CDF mixture weights must be >= 0 and widths > 0");
        }
        total += c.alpha;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "CDF mixture weights must sum to 1");
    }
    return {MechanismKind::CdfMix, std::move(components)};
}

MechanismSpec random_cdf_mix(CounterRng& rng, std::size_t n) {
    std::vector<CdfComponent> components(n);
    double total = 0.0;
    for (auto& c : components) {
        c.alpha = rng.uniform();
        c.mu = rng.uniform();
        c.sigma = std::max(kMinCdfWidth, rng.uniform(0.0, 0.1));
        total += c.alpha;
    }
    for (auto& c : components) c.alpha /= total;
    // Renormalization can leave the sum a few ulps away from 1; fold that into the last weight.
    double partial = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) partial += components[i].alpha;
    components.back().alpha = 1.0 - partial;
    return MechanismSpec::cdf_mix(std::move(components));
}

char label(const MechanismSpec& spec) {
    switch (spec.kind) {
        case MechanismKind::PowerThird: return 'a';
        case MechanismKind::SqrtPow: return 'b';
        case MechanismKind::Square: return 'c';
        case MechanismKind::Cube: return 'd';
        case MechanismKind::CdfMix: return 'e';
    }
    return '?';
}

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

double apply_mechanism(const MechanismSpec& spec, double x) {
    switch (spec.kind) {
        case MechanismKind::PowerThird: return std::cbrt(x);
        case MechanismKind::SqrtPow: return std::sqrt(x);
        case MechanismKind::Square: return x * x;
        case MechanismKind::Cube: return x * x * x;
        case MechanismKind::CdfMix: {
            double s = 0.0;
            for (const auto& c : spec.components) s += c.alpha * normal_cdf(x, c.mu, c.sigma);
            return s;
        }
    }
    return x;
}

std::vector<double> apply_mechanism(const MechanismSpec& spec, std::span<const double> x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) out.push_back(apply_mechanism(spec, v));
    return out;
}

std::string_view to_string(NoiseKind kind) noexcept {
    switch (kind) {
        case NoiseKind::None: return "none";
        case NoiseKind::UniformUnit: return "uniform";
        case NoiseKind::StdNormal: return "normal";
        case NoiseKind::Laplace: return "laplace";
    }
    return "unknown";
}

void add_noise(std::span<double> y, const NoiseSpec& noise, CounterRng& rng) {
    if (!(noise.lambda >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "noise level must be non-negative");
    }
    if (noise.kind == NoiseKind::None || noise.lambda == 0.0) return;
    for (double& v : y) {
        double e = 0.0;
        switch (noise.kind) {
            case NoiseKind::UniformUnit: e = rng.uniform(); break;
            case NoiseKind::StdNormal: e = rng.normal(); break;
            case NoiseKind::Laplace: e = rng.laplace(noise.laplace_scale); break;
            case NoiseKind::None: break;
        }
        v += noise.lambda * e;
    }
}

Direction run_trial(const InputDist& input, std::size_t mechanism, const GridConfig& config, CounterRng& rng) {
    std::vector<double> x = sample_input(input, config.m, rng);
    const MechanismSpec spec = grid_mechanism(mechanism, rng);
    std::vector<double> y = apply_mechanism(spec, x);
    add_noise(y, config.noise, rng);
    try {
        SamplePair pair = config.reversed_roles ? SamplePair(std::move(y), std::move(x))
                                                : SamplePair(std::move(x), std::move(y));
        return igci_score(pair, config.reference, config.estimator).direction;
    } catch (const Error&) {
        return Direction::Undecided;
    }
}

SimGridResult run_grid(const GridConfig& config) {
    if (config.m < 3 || config.repetitions < 1) {
        throw Error(ErrorCode::InvalidArgument, "grid needs m >= 3 and at least one repetition");
    }
    SimGridResult result;
    result.config = config;
    const auto inputs = grid_inputs(config.sigma);

    parallel_for(result.cells.size(), config.threads, [&](std::size_t cell) {
        CellTally tally;
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            CounterRng rng(config.seed, {kGridStream, cell, rep});
            switch (run_trial(inputs[cell / 5], cell % 5, config, rng)) {
                case Direction::XtoY: ++tally.correct; break;
                case Direction::YtoX: ++tally.wrong; break;
                case Direction::Undecided: ++tally.undecided; break;
            }
        }
        result.cells[cell] = tally;
    });
    return result;
}

std::vector<SineResult> run_sine(const SineConfig& config) {
    if (!(std::abs(config.epsilon * config.omega) < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "|epsilon * omega| must be below 1 for a monotone map");
    }
    if (config.m < 3 || config.repetitions < 1) {
        throw Error(ErrorCode::InvalidArgument, "sine experiment needs m >= 3 and at least one repetition");
    }
    std::vector<SineResult> results;
    results.reserve(config.inputs.size());
    for (std::size_t i = 0; i < config.inputs.size(); ++i) {
        SineResult r{config.inputs[i], {}};
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            CounterRng rng(config.seed, {kSineStream, i, rep});
            std::vector<double> x = sample_input(config.inputs[i], config.m, rng);
            std::vector<double> y(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + config.epsilon * std::sin(config.omega * x[k]);
            Direction dir = Direction::Undecided;
            try {
                dir = igci_score(SamplePair(std::move(x), std::move(y)), config.reference, config.estimator).direction;
            } catch (const Error&) {
            }
            switch (dir) {
                case Direction::XtoY: ++r.tally.correct; break;
                case Direction::YtoX: ++r.tally.wrong; break;
                case Direction::Undecided: ++r.tally.undecided; break;
            }
        }
        results.push_back(r);
    }
    return results;
}

FisherEstimate estimate_fisher_information(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 10) {
        throw Error(ErrorCode::InvalidArgument, "Fisher information estimate needs at least 10 values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = std::sqrt(variance(sorted));
    if (!(sd > 0.0)) {
        throw Error(ErrorCode::ConstantInput, "variable is constant");
    }
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);

    const double lo = sorted.front() - 7.0 * h;
    const double hi = sorted.back() + 7.0 * h;
    constexpr std::size_t kMaxGrid = std::size_t{1} << 20;
    const std::size_t grid = std::min(kMaxGrid, static_cast<std::size_t>(std::ceil((hi - lo) / (h / 16.0))) + 1);
    const double step = (hi - lo) / static_cast<double>(grid - 1);

    // Linear binning.
    std::vector<double> weight(grid, 0.0);
    for (double v : sorted) {
        const double pos = (v - lo) / step;
        const auto k = std::min(static_cast<std::size_t>(pos), grid - 2);
        const double frac = pos - static_cast<double>(k);
        weight[k] += 1.0 - frac;
        weight[k + 1] += frac;
    }

    const auto half = static_cast<std::ptrdiff_t>(std::ceil(7.0 * h / step));
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    std::vector<double> kernel_slope(kernel.size());
    const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::ptrdiff_t j = -half; j <= half; ++j) {
        const double t = static_cast<double>(j) * step / h;
        const double phi = norm * std::exp(-0.5 * t * t);
        kernel[static_cast<std::size_t>(j + half)] = phi;
        // derivative of the kernel with respect to the evaluation point
        kernel_slope[static_cast<std::size_t>(j + half)] = -t / h * phi;
    }

    double smoothed = 0.0;
    const auto g = static_cast<std::ptrdiff_t>(grid);
    for (std::ptrdiff_t k = 0; k < g; ++k) {
        double p = 0.0, dp = 0.0;
        const std::ptrdiff_t first = std::max<std::ptrdiff_t>(0, k - half);
        const std::ptrdiff_t last = std::min<std::ptrdiff_t>(g - 1, k + half);
        for (std::ptrdiff_t j = first; j <= last; ++j) {
            const double w = weight[static_cast<std::size_t>(j)];
            if (w == 0.0) continue;
            const auto idx = static_cast<std::size_t>(k - j + half);
            p += w * kernel[idx];
            dp += w * kernel_slope[idx];
        }
        if (p > 1e-300) smoothed += dp * dp / p * step;
    }

    FisherEstimate out;
    out.smoothed = smoothed;
    out.bandwidth = h;
    const double inverse = 1.0 / smoothed - h * h;
    out.value = inverse > 0.0 ? 1.0 / inverse : std::numeric_limits<double>::infinity();
    return out;
}

NoiseBoundReport verify_noise_bound(std::span<const double> x, std::span<const double> sigma_levels,
                                    std::uint64_t seed, double tolerance) {
    NoiseBoundReport report;
    report.entropy_x = spacing_entropy(x);
    report.fisher = estimate_fisher_information(x);

    CounterRng rng(seed, {kNoiseBoundStream});
    std::vector<double> z(x.size());
    for (double& v : z) v = rng.normal();

    std::vector<double> noisy(x.size());
    for (double sigma : sigma_levels) {
        if (!(sigma >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "noise variance must be non-negative");
        }
        const double amplitude = std::sqrt(sigma);
        for (std::size_t i = 0; i < x.size(); ++i) noisy[i] = x[i] + amplitude * z[i];

        NoiseBoundLevel level;
        level.sigma = sigma;
        level.entropy_noisy = spacing_entropy(noisy);
        level.bound = report.entropy_x + (sigma == 0.0 ? 0.0 : 0.5 * std::log1p(sigma * report.fisher.value));
        level.slack = level.bound - level.entropy_noisy;
        level.holds = level.slack >= -tolerance;
        report.levels.push_back(level);
    }
    return report;
}

double entropy_preserving_noise_limit(double entropy_x, double entropy_y, double fisher_y) {
    if (!(fisher_y > 0.0)) {
        throw Error(ErrorCode::DomainError, "Fisher information must be positive");
    }
    return std::expm1(2.0 * (entropy_x - entropy_y)) / fisher_y;
}

}  // namespace igci::sim
