#pragma once

// Hand-rolled generators for property tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "newsrace/random.hpp"
#include "newsrace/traversal.hpp"

namespace testgen {

using newsrace::Stream;

inline double uniform(Stream& rng, double lo, double hi) { return lo + (hi - lo) * newsrace::uniform01(rng); }

inline int integer(Stream& rng, int lo, int hi) {
    return lo + static_cast<int>(newsrace::uniform01(rng) * (hi - lo + 1));
}

inline newsrace::Marginal light_marginal(Stream& rng) {
    switch (integer(rng, 0, 2)) {
        case 0:
            return newsrace::Marginal::exponential(uniform(rng, 0.2, 5.0));
        case 1:
            return newsrace::Marginal::deterministic(uniform(rng, 0.1, 3.0));
        default: {
            const double a = uniform(rng, 0.0, 2.0);
            return newsrace::Marginal::uniform(a, a + uniform(rng, 0.1, 3.0));
        }
    }
}

inline newsrace::Marginal continuous_marginal(Stream& rng) {
    switch (integer(rng, 0, 2)) {
        case 0:
            return newsrace::Marginal::exponential(uniform(rng, 0.2, 5.0));
        case 1: {
            const double a = uniform(rng, 0.0, 2.0);
            return newsrace::Marginal::uniform(a, a + uniform(rng, 0.1, 3.0));
        }
        default:
            return newsrace::Marginal::pareto(uniform(rng, 1.5, 5.0), uniform(rng, 0.2, 2.0));
    }
}

inline newsrace::Coupling coupling(Stream& rng) {
    return static_cast<newsrace::Coupling>(integer(rng, 0, 2));
}

// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

// 1% critical value of the KS statistic, large-sample form.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace testgen
