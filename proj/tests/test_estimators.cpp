#include "doctest.h"

#include "igci/error.hpp"
#include "igci/estimators.hpp"
#include "igci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace igci;

namespace {

std::vector<double> uniform_draws(sim::CounterRng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& e : v) e = rng.uniform();
    return v;
}

/// A random strictly increasing map built from a positive mixture of smooth steps.
double random_monotone(double x, const std::vector<double>& params) {
    double y = params[0] * x;
    for (std::size_t i = 1; i + 2 < params.size(); i += 3) {
        y += params[i] * std::tanh((x - params[i + 1]) / params[i + 2]);
    }
    return y;
}

}  // namespace

TEST_CASE("spacing_entropy") {
    SUBCASE("three points, hand evaluation") {
        // psi(3) - psi(1) = 1 + 1/2 ; both spacings are 1/2.
        const std::vector<double> v{0, 0.5, 1};
        CHECK(spacing_entropy(v) == doctest::Approx(1.5 - std::numbers::ln2).epsilon(1e-14));
    }
    SUBCASE("order does not matter") {
        const std::vector<double> a{0.3, 0.1, 0.9, 0.4}, b{0.9, 0.4, 0.3, 0.1};
        CHECK(spacing_entropy(a) == spacing_entropy(b));
    }
    SUBCASE("zero spacings are skipped") {
        // Spacings 0, 0.5, 0.5: the tie is dropped and the mean taken over two terms.
        const std::vector<double> v{0, 0, 0.5, 1};
        const auto detail = spacing_entropy_detail(v);
        CHECK(detail.terms == 2);
        const double expected = (1.0 + 0.5 + 1.0 / 3.0) - std::numbers::ln2;
        CHECK(detail.value == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("all tied") {
        const std::vector<double> v{2, 2, 2, 2};
        CHECK_THROWS_AS((void)spacing_entropy(v), Error);
        try {
            (void)spacing_entropy(v);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::AllTied);
        }
    }
    SUBCASE("uniform and Gaussian entropies") {
        sim::CounterRng rng(21);
        const auto u = uniform_draws(rng, 10000);
        CHECK(std::abs(spacing_entropy(u)) < 0.05);
        std::vector<double> g(10000);
        for (double& e : g) e = rng.normal();
        CHECK(std::abs(spacing_entropy(g) - 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e)) < 0.05);
    }
}

TEST_CASE("slope_criterion") {
    const std::vector<double> x{0, 0.5, 1};
    SUBCASE("identity map") {
        CHECK(slope_criterion(x, x) == 0.0);
    }
    SUBCASE("square map, two terms") {
        const std::vector<double> y{0, 0.25, 1};
        CHECK(slope_criterion(x, y) == doctest::Approx(0.5 * (std::log(0.5) + std::log(1.5))).epsilon(1e-14));
    }
    SUBCASE("constant y has no usable terms") {
        const std::vector<double> xs{0, 1, 2}, y{5, 5, 5};
        try {
            (void)slope_criterion(xs, y);
            FAIL("expected NoValidSpacings");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoValidSpacings);
        }
    }
    SUBCASE("ties in x are sorted by y and the zero-dx term skipped") {
        const std::vector<double> xs{1, 0, 1}, y{3, 0, 1};
        // Sorted: (0,0), (1,1), (1,3) -> slopes 1 and a skipped dx = 0 term.
        const auto detail = slope_criterion_detail(xs, y);
        CHECK(detail.terms == 1);
        CHECK(detail.value == 0.0);
    }
    SUBCASE("antisymmetry for monotone data") {
        sim::CounterRng rng(4);
        for (int trial = 0; trial < 100; ++trial) {
            const auto xs = uniform_draws(rng, 200);
            std::vector<double> y;
            for (double v : xs) y.push_back(std::exp(2.0 * v) + v);
            CHECK(std::abs(slope_criterion(xs, y) + slope_criterion(y, xs)) < 1e-12);
        }
    }
    SUBCASE("affine equivariance") {
        sim::CounterRng rng(8);
        for (int trial = 0; trial < 200; ++trial) {
            const auto xs = uniform_draws(rng, 100);
            std::vector<double> y;
            for (double v : xs) y.push_back(v * v * v + 0.1 * rng.normal());
            const double a = rng.uniform(0.1, 10.0) * (rng.uniform() < 0.5 ? -1 : 1);
            const double b = rng.uniform(0.1, 10.0) * (rng.uniform() < 0.5 ? -1 : 1);
            const double c = rng.normal(0.0, 5.0), d = rng.normal(0.0, 5.0);
            std::vector<double> xt, yt;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                xt.push_back(a * xs[i] + c);
                yt.push_back(b * y[i] + d);
            }
            CHECK(std::abs(slope_criterion(xt, yt) - slope_criterion(xs, y) - std::log(std::abs(b / a))) < 1e-10);
        }
    }
}

TEST_CASE("estimator identity in the deterministic case") {
    sim::CounterRng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> params{rng.uniform(0.01, 1.0)};
        for (int k = 0; k < 3; ++k) {
            params.push_back(rng.uniform(0.0, 1.0));
            params.push_back(rng.uniform(0.0, 1.0));
            params.push_back(rng.uniform(0.02, 0.3));
        }
        const bool decreasing = rng.uniform() < 0.3;
        const auto x = uniform_draws(rng, 300);
        std::vector<double> y;
        for (double v : x) y.push_back((decreasing ? -1.0 : 1.0) * random_monotone(v, params));
        const auto xn = normalize_uniform(x).values;
        const auto yn = normalize_uniform(y).values;
        CHECK(std::abs((spacing_entropy(yn) - spacing_entropy(xn)) - slope_criterion(xn, yn)) <= 1e-10);
    }
}

TEST_CASE("igci_score") {
    sim::CounterRng rng(31);

    SUBCASE("uniform cause, cube-root mechanism: X -> Y with both estimators") {
        const auto x = uniform_draws(rng, 1000);
        std::vector<double> y;
        for (double v : x) y.push_back(std::cbrt(v));
        const SamplePair pair(x, y);
        for (auto est : {EstimatorKind::EntropySpacing, EstimatorKind::SlopeIntegral}) {
            const auto r = igci_score(pair, ReferenceFamily::UniformUnit, est);
            CHECK(r.direction == Direction::XtoY);
            CHECK(r.c_yx == -r.c_xy);
            CHECK(r.m_used == 1000);
            CHECK(r.estimator == est);
        }
        const auto swapped = igci_score(pair.swapped(), ReferenceFamily::UniformUnit, EstimatorKind::EntropySpacing);
        CHECK(swapped.direction == Direction::YtoX);
    }
    SUBCASE("identical variables are undecided") {
        const auto x = uniform_draws(rng, 500);
        const SamplePair pair(x, x);
        for (auto ref : {ReferenceFamily::UniformUnit, ReferenceFamily::Gaussian}) {
            for (auto est : {EstimatorKind::EntropySpacing, EstimatorKind::SlopeIntegral}) {
                const auto r = igci_score(pair, ref, est);
                CHECK(r.direction == Direction::Undecided);
                CHECK(r.c_xy == 0.0);
            }
        }
    }
    SUBCASE("input peaked where the mechanism is steep: systematic failure") {
        std::vector<double> x;
        while (x.size() < 1000) {
            const double v = rng.normal(0.0, 0.2);
            if (v >= 0.0 && v <= 1.0) x.push_back(v);
        }
        std::vector<double> y;
        for (double v : x) y.push_back(std::cbrt(v));
        const auto r = igci_score(SamplePair(x, y), ReferenceFamily::UniformUnit, EstimatorKind::EntropySpacing);
        CHECK(r.direction == Direction::YtoX);
    }
    SUBCASE("estimators agree on noise-free monotone data") {
        for (int trial = 0; trial < 50; ++trial) {
            const auto x = uniform_draws(rng, 300);
            const double power = rng.uniform(0.2, 5.0);
            std::vector<double> y;
            for (double v : x) y.push_back(std::pow(v, power));
            const SamplePair pair(x, y);
            const auto e = igci_score(pair, ReferenceFamily::UniformUnit, EstimatorKind::EntropySpacing);
            const auto s = igci_score(pair, ReferenceFamily::UniformUnit, EstimatorKind::SlopeIntegral);
            CHECK(e.direction == s.direction);
            CHECK(std::abs(e.c_xy - s.c_xy) < 1e-10);
        }
    }
    SUBCASE("scores depend only on the multiset of pairs") {
        const auto x = uniform_draws(rng, 200);
        std::vector<double> y;
        for (double v : x) y.push_back(v * v + 0.01 * rng.normal());
        std::vector<std::size_t> perm(x.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i * 37 + 11) % perm.size();
        std::vector<double> xp, yp;
        for (std::size_t i : perm) {
            xp.push_back(x[i]);
            yp.push_back(y[i]);
        }
        for (auto est : {EstimatorKind::EntropySpacing, EstimatorKind::SlopeIntegral}) {
            CHECK(igci_score(SamplePair(x, y), ReferenceFamily::UniformUnit, est).c_xy ==
                  igci_score(SamplePair(xp, yp), ReferenceFamily::UniformUnit, est).c_xy);
        }
    }
    SUBCASE("isotropic reference is rejected") {
        const SamplePair pair({0, 1, 2}, {0, 1, 4});
        try {
            (void)igci_score(pair, ReferenceFamily::IsotropicGaussian, EstimatorKind::EntropySpacing);
            FAIL("expected InvalidReference");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidReference);
        }
    }
    SUBCASE("constant variable") {
        const SamplePair pair({0, 1, 2}, {3, 3, 3});
        try {
            (void)igci_score(pair, ReferenceFamily::UniformUnit, EstimatorKind::SlopeIntegral);
            FAIL("expected ConstantInput");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ConstantInput);
        }
    }
}

TEST_CASE("reference_shift") {
    SUBCASE("equal scales give no shift") {
        const SamplePair pair({0, 0.5, 1}, {1, 0.5, 0});
        CHECK(reference_shift(pair) == doctest::Approx(0.0));
    }
    SUBCASE("hand evaluation") {
        // x: range 1, sd 1/2.  y: range 1, sd sqrt(1/8).  shift = log(1/2) - log(sqrt(1/8)) = log(2) / 2.
        const SamplePair pair({0, 0, 1, 1}, {0, 0.5, 0.5, 1});
        CHECK(reference_shift(pair) == doctest::Approx(0.5 * std::numbers::ln2).epsilon(1e-14));
    }
    SUBCASE("matches the difference of two full pipeline runs") {
        sim::CounterRng rng(12);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x, y;
            for (int i = 0; i < 300; ++i) {
                const double v = rng.normal(2.0, 3.0);
                x.push_back(v);
                y.push_back(std::exp(0.3 * v) + 2.0 * v);
            }
            const SamplePair pair(x, y);
            for (auto est : {EstimatorKind::SlopeIntegral, EstimatorKind::EntropySpacing}) {
                const double g = igci_score(pair, ReferenceFamily::Gaussian, est).c_xy;
                const double u = igci_score(pair, ReferenceFamily::UniformUnit, est).c_xy;
                CHECK(std::abs((g - u) - reference_shift(pair)) <= 1e-10);
            }
        }
    }
}
