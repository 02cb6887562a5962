#pragma once

#include <functional>
#include <string>
#include <vector>

#include "newsrace/random.hpp"
#include "newsrace/traversal.hpp"

namespace newsrace {

// ---------------------------------------------------------------------------
// rho = inf_{s >= 0} psi(s)

enum class RhoStatus { InteriorMin, DriftPositive, DivergentAll, BoundaryNotCovered };

std::string_view to_string(RhoStatus s);

struct RhoResult {
    RhoStatus status = RhoStatus::InteriorMin;
    double h = 0.0;    // minimizer, NaN for DriftPositive / DivergentAll
    double rho = 1.0;  // psi(h), NaN for DriftPositive / DivergentAll
    double s_max = 0.0;
};

/// A convex transform s -> E[exp(s X)] known on [0, abscissa], with
/// value(s) = +inf beyond. Lets callers probe the minimizer for laws outside
/// the built-in families.
struct Transform {
    std::function<double(double)> value;
    double abscissa;
};

/// Golden-section minimization on [0, abscissa]. Reports BoundaryNotCovered
/// when the minimizer sits at a finite abscissa where the transform is finite
/// and still decreasing (no critical point exists).
RhoResult minimize_transform(const Transform& t, double tol = 1e-10);

RhoResult solve_rho(const JointTraversalModel& model, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Malthusian parameters: E[exp(-lambda L)] = 1/nu

struct MalthusReport {
    double lambda = 0.0;
    double residual = 0.0;
};

/// Bisection on lambda. Throws NoRoot when P(L = 0) >= 1/nu, and when nu is
/// not a finite number above 1.
MalthusReport solve_malthusian(const Marginal& m, double nu, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Verdicts

enum class WeakOutcome { Survives, Dies, NotCovered };

enum class WeakCase {
    MeanAdvantage,    // E[L^R] > E[L^F]
    RhoCriterion,     // light tails, compare rho with 1/nu
    HeavyTail,        // psi infinite for every s > 0
    InfiniteNu,
    NoCriticalPoint,  // psi finite somewhere but no interior minimizer
};

struct WeakVerdict {
    WeakOutcome outcome = WeakOutcome::NotCovered;
    WeakCase basis = WeakCase::NoCriticalPoint;
    double mean_correct = 0.0;
    double mean_fake = 0.0;
    double nu = 0.0;
    RhoResult rho;

    /// e.g. "Survives(i)", "Dies(ii)", "NotCovered".
    std::string label() const;
};

WeakVerdict classify_weak(const JointTraversalModel& model, double nu);

/// Same decision order on precomputed inputs; nu may be +inf.
WeakVerdict classify_weak(double mean_correct, double mean_fake, const RhoResult& rho, double nu);

enum class StrongOutcome { Survives, Dies, Boundary };

std::string_view to_string(StrongOutcome o);

struct StrongVerdict {
    StrongOutcome outcome = StrongOutcome::Boundary;
    // graph criterion
    double lambda_fake = 0.0;
    double lambda_correct = 0.0;
    // tree criterion
    double mean_fake = 0.0;
    double mean_correct = 0.0;
};

/// Malthusian comparison on the configuration model. `tol` is relative:
/// |lambda^R - lambda^F| <= tol * max(lambda^R, lambda^F) is reported as Boundary.
StrongVerdict classify_strong_graph(const JointTraversalModel& model, double nu, double tol = 1e-9);

/// Mean comparison on a finite number of tree generations.
StrongVerdict classify_strong_tree(const JointTraversalModel& model);

// ---------------------------------------------------------------------------
// Stable-age quantities of the fake-news branching process

/// nu * E[L^F exp(-lambda L^F)], the mean of the stable-age law.
double stable_age_mean(const Marginal& fake, double nu, double lambda);

/// nu * E[L^R exp(-lambda L^F)], the mean of the tilted correct-news time.
double tilted_correct_mean(const JointTraversalModel& model, double nu, double lambda);

/// H(x) = int_0^inf exp(-lambda z) P(L in (z, z + x)) dz; x may be +inf.
/// Closed forms for exponential and deterministic laws, quadrature otherwise.
double lifetime_profile(const Marginal& fake, double lambda, double x);

/// Quadrature route for H regardless of family.
double lifetime_profile_quadrature(const Marginal& fake, double lambda, double x);

struct StableAgeOptions {
    std::vector<double> h_grid;
    std::vector<double> horizons_t;  // T values for p*_T
    std::int64_t reps = 10000;
    int horizon = 10000;             // walk steps
};

struct StableAgeReport {
    double lambda_fake = 0.0;
    double nu_bar_fake = 0.0;
    double mean_bar_correct = 0.0;
    std::vector<std::pair<double, double>> h_values;  // (x, H(x))
    double p_star_hat = 0.0;
    double p_star_stderr = 0.0;
    int horizon = 0;
    double truncation_bias_bound = 0.0;  // Brownian estimate of P(later crossing), times p_star_hat
    std::vector<std::pair<double, double>> p_star_t;  // (T, p*_T)
    double acceptance_rate = 0.0;
    double acceptance_stderr = 0.0;
    std::int64_t proposals = 0;
};

/// p* is estimated on the tilted walk: pairs are accepted with probability
/// exp(-lambda^F lF) (acceptance rate exactly 1/nu), and a path survives when
/// every partial sum of lR - lF stays >= 0 up to the horizon.
StableAgeReport stable_age_report(const JointTraversalModel& model, double nu, const StableAgeOptions& opts,
                                  Stream& rng);

}  // namespace newsrace
