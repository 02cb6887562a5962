#include "newsrace/survival_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "newsrace/errors.hpp"
#include "quadrature.hpp"

namespace newsrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double q(const Marginal& m, double u, double a) { return u <= 0.5 ? m.quantile(u) : m.quantile_complement(a); }

double mass_at_zero(const Marginal& m) {
    if (const auto* d = std::get_if<Deterministic>(&m.law())) return d->value == 0.0 ? 1.0 : 0.0;
    return 0.0;
}

// d/ds E[exp(s L)] at s = -lambda, i.e. E[L exp(-lambda L)]
double tilted_first_moment(const Marginal& m, double lambda) {
    if (const auto* e = std::get_if<Exponential>(&m.law())) return e->rate / ((e->rate + lambda) * (e->rate + lambda));
    if (const auto* d = std::get_if<Deterministic>(&m.law())) return d->value * std::exp(-lambda * d->value);
    if (const auto* u = std::get_if<Uniform>(&m.law())) {
        if (lambda == 0.0) return 0.5 * (u->lo + u->hi);
        auto antider = [lambda](double x) { return -(x / lambda + 1.0 / (lambda * lambda)) * std::exp(-lambda * x); };
        return (antider(u->hi) - antider(u->lo)) / (u->hi - u->lo);
    }
    // Central differences of the transform with one Richardson step.
    const double step = std::min(1e-4, 0.25 * lambda);
    auto central = [&](double h) { return (mgf(m, -lambda + h) - mgf(m, -lambda - h)) / (2.0 * h); };
    const double coarse = central(step), fine = central(0.5 * step);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

std::string_view to_string(RhoStatus s) {
    switch (s) {
        case RhoStatus::InteriorMin:
            return "InteriorMin";
        case RhoStatus::DriftPositive:
            return "DriftPositive";
        case RhoStatus::DivergentAll:
            return "DivergentAll";
        case RhoStatus::BoundaryNotCovered:
            return "BoundaryNotCovered";
    }
    return "?";
}

std::string_view to_string(StrongOutcome o) {
    switch (o) {
        case StrongOutcome::Survives:
            return "Survives";
        case StrongOutcome::Dies:
            return "Dies";
        case StrongOutcome::Boundary:
            return "Boundary";
    }
    return "?";
}

RhoResult minimize_transform(const Transform& t, double tol) {
    RhoResult res;
    res.s_max = t.abscissa;
    if (!(t.abscissa > 0.0)) {
        res.status = RhoStatus::DivergentAll;
        res.h = res.rho = kNaN;
        return res;
    }
    auto f = [&](double s) {
        if (s > t.abscissa) return kInf;
        const double v = t.value(s);
        return std::isnan(v) ? kInf : v;
    };

    double hi = t.abscissa;
    if (!std::isfinite(hi)) {
        // Convexity: once f(b) >= f(b/2) the minimizer lies in [0, b].
        hi = 1.0;
        while (f(hi) < f(0.5 * hi)) {
            hi *= 2.0;
            if (hi > 1e12) {
                res.status = RhoStatus::BoundaryNotCovered;
                res.h = kInf;
                res.rho = f(0.5 * hi);
                return res;
            }
        }
    }

    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double h = 0.5 * (a + b);
    double rho = f(h);
    if (f(0.0) <= rho) {
        h = 0.0;
        rho = f(0.0);
    }

    if (std::isfinite(t.abscissa) && t.abscissa - h <= std::max(10.0 * tol, 1e-9 * t.abscissa)) {
        const double edge = f(t.abscissa);
        const double inside = f(t.abscissa * (1.0 - 1e-6));
        if (std::isfinite(edge) && edge < inside) {
            res.status = RhoStatus::BoundaryNotCovered;
            res.h = t.abscissa;
            res.rho = edge;
            return res;
        }
    }
    res.status = RhoStatus::InteriorMin;
    res.h = h;
    res.rho = rho;
    return res;
}

RhoResult solve_rho(const JointTraversalModel& model, double tol) {
    const double mr = mean(model.correct), mf = mean(model.fake);
    const double s_max = psi_abscissa(model);
    RhoResult res;
    res.s_max = s_max;
    if (mr > mf) {
        res.status = RhoStatus::DriftPositive;
        res.h = res.rho = kNaN;
        return res;
    }
    if (s_max == 0.0) {
        res.status = RhoStatus::DivergentAll;
        res.h = res.rho = kNaN;
        return res;
    }
    // psi'(0) = E[L^R] - E[L^F] = 0 puts the minimum at the origin.
    if (std::isfinite(mr) && std::abs(mr - mf) <= 1e-14 * std::max(1.0, std::abs(mf))) {
        res.status = RhoStatus::InteriorMin;
        res.h = 0.0;
        res.rho = 1.0;
        return res;
    }
    return minimize_transform({[&](double s) { return psi(model, s); }, s_max}, tol);
}

MalthusReport solve_malthusian(const Marginal& m, double nu, double tol) {
    if (!(nu > 1.0) || !std::isfinite(nu)) throw NoRoot("Malthusian parameter needs finite nu > 1");
    const double target = 1.0 / nu;
    if (mass_at_zero(m) >= target) throw NoRoot("P(L = 0) >= 1/nu: no positive Malthusian root");
    auto g = [&](double lambda) { return mgf(m, -lambda) - target; };

    double lo = 0.0, hi = 1.0;
    while (g(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NoRoot("Malthusian bracket search failed");
    }
    for (int it = 0; it < 2000 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = g(mid);
        if (v == 0.0) {
            lo = hi = mid;
            break;
        }
        (v > 0.0 ? lo : hi) = mid;
    }
    MalthusReport rep;
    rep.lambda = 0.5 * (lo + hi);
    rep.residual = std::abs(g(rep.lambda));
    (void)tol;
    return rep;
}

std::string WeakVerdict::label() const {
    switch (outcome) {
        case WeakOutcome::NotCovered:
            return "NotCovered";
        case WeakOutcome::Dies:
            return "Dies(ii)";
        case WeakOutcome::Survives:
            switch (basis) {
                case WeakCase::MeanAdvantage:
                    return "Survives(i)";
                case WeakCase::RhoCriterion:
                    return "Survives(ii)";
                case WeakCase::HeavyTail:
                    return "Survives(iii)";
                case WeakCase::InfiniteNu:
                    return "Survives(infinite-nu)";
                case WeakCase::NoCriticalPoint:
                    break;
            }
    }
    return "?";
}

WeakVerdict classify_weak(double mean_correct, double mean_fake, const RhoResult& rho, double nu) {
    if (!(nu > 1.0)) throw std::invalid_argument("classify_weak needs nu > 1");
    WeakVerdict v;
    v.mean_correct = mean_correct;
    v.mean_fake = mean_fake;
    v.nu = nu;
    v.rho = rho;
    if (mean_correct > mean_fake) {
        v.outcome = WeakOutcome::Survives;
        v.basis = WeakCase::MeanAdvantage;
        return v;
    }
    if (rho.status == RhoStatus::DivergentAll) {
        v.outcome = WeakOutcome::Survives;
        v.basis = WeakCase::HeavyTail;
        return v;
    }
    if (std::isinf(nu)) {
        v.outcome = WeakOutcome::Survives;
        v.basis = WeakCase::InfiniteNu;
        return v;
    }
    if (rho.status == RhoStatus::InteriorMin) {
        v.basis = WeakCase::RhoCriterion;
        v.outcome = rho.rho > 1.0 / nu ? WeakOutcome::Survives : WeakOutcome::Dies;
        return v;
    }
    v.outcome = WeakOutcome::NotCovered;
    v.basis = WeakCase::NoCriticalPoint;
    return v;
}

WeakVerdict classify_weak(const JointTraversalModel& model, double nu) {
    const double mr = mean(model.correct), mf = mean(model.fake);
    RhoResult rho;
    if (mr > mf) {
        rho.status = RhoStatus::DriftPositive;
        rho.h = rho.rho = kNaN;
        rho.s_max = psi_abscissa(model);
    } else {
        rho = solve_rho(model);
    }
    return classify_weak(mr, mf, rho, nu);
}

StrongVerdict classify_strong_graph(const JointTraversalModel& model, double nu, double tol) {
    StrongVerdict v;
    v.lambda_fake = solve_malthusian(model.fake, nu).lambda;
    v.lambda_correct = solve_malthusian(model.correct, nu).lambda;
    v.mean_fake = mean(model.fake);
    v.mean_correct = mean(model.correct);
    const double gap = v.lambda_fake - v.lambda_correct;
    const double scale = std::max(v.lambda_fake, v.lambda_correct);
    if (gap > tol * scale)
        v.outcome = StrongOutcome::Survives;
    else if (-gap > tol * scale)
        v.outcome = StrongOutcome::Dies;
    else
        v.outcome = StrongOutcome::Boundary;
    return v;
}

StrongVerdict classify_strong_tree(const JointTraversalModel& model) {
    StrongVerdict v;
    v.mean_fake = mean(model.fake);
    v.mean_correct = mean(model.correct);
    v.outcome = v.mean_correct > v.mean_fake ? StrongOutcome::Survives : StrongOutcome::Dies;
    return v;
}

double stable_age_mean(const Marginal& fake, double nu, double lambda) {
    return nu * tilted_first_moment(fake, lambda);
}

double tilted_correct_mean(const JointTraversalModel& model, double nu, double lambda) {
    const auto& f = model.fake;
    const auto& r = model.correct;
    if (model.coupling == Coupling::Independent) return nu * mean(r) * mgf(f, -lambda);
    if (f.is<Deterministic>() && r.is<Deterministic>())
        return nu * r.support_min() * std::exp(-lambda * f.support_min());
    if (!std::isfinite(mean(r)) && !(model.coupling == Coupling::Comonotone && !f.bounded())) return kInf;
    if (model.coupling == Coupling::Comonotone)
        return nu * detail::integrate_driver(
                        [&](double u, double a) { return q(r, u, a) * std::exp(-lambda * q(f, u, a)); });
    return nu *
           detail::integrate_driver([&](double u, double a) { return q(r, a, u) * std::exp(-lambda * q(f, u, a)); });
}

double lifetime_profile_quadrature(const Marginal& fake, double lambda, double x) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lifetime profile needs lambda > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("lifetime profile needs x >= 0");
    // H(x) = E[ (exp(-lambda (L - x)^+) - exp(-lambda L)) / lambda ], split at the
    // quantile where L = x so each piece is smooth.
    const double split = std::isinf(x) ? 1.0 : fake.cdf(x);
    double total = 0.0;
    if (split > 0.0)
        total += detail::integrate_interval([&](double u) { return -std::expm1(-lambda * fake.quantile(u)); }, 0.0,
                                            split);
    if (split < 1.0) {
        const double tail = detail::integrate_interval(
            [&](double u) { return std::exp(-lambda * fake.quantile(u)); }, split, 1.0);
        total += std::expm1(lambda * x) * tail;
    }
    return total / lambda;
}

double lifetime_profile(const Marginal& fake, double lambda, double x) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lifetime profile needs lambda > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("lifetime profile needs x >= 0");
    if (const auto* e = std::get_if<Exponential>(&fake.law())) {
        const double mass = std::isinf(x) ? 1.0 : -std::expm1(-e->rate * x);
        return mass / (lambda + e->rate);
    }
    if (const auto* d = std::get_if<Deterministic>(&fake.law())) {
        // c in (z, z + x) iff z in (c - x, c)
        const double lo = std::max(0.0, d->value - x);
        return (std::exp(-lambda * lo) - std::exp(-lambda * d->value)) / lambda;
    }
    return lifetime_profile_quadrature(fake, lambda, x);
}

StableAgeReport stable_age_report(const JointTraversalModel& model, double nu, const StableAgeOptions& opts,
                                  Stream& rng) {
    if (opts.reps < 1 || opts.horizon < 1) throw std::invalid_argument("stable_age_report needs reps, horizon >= 1");
    StableAgeReport rep;
    const double lambda = solve_malthusian(model.fake, nu).lambda;
    rep.lambda_fake = lambda;
    rep.nu_bar_fake = stable_age_mean(model.fake, nu, lambda);
    rep.mean_bar_correct = tilted_correct_mean(model, nu, lambda);
    for (double x : opts.h_grid) rep.h_values.emplace_back(x, lifetime_profile(model.fake, lambda, x));
    rep.horizon = opts.horizon;

    std::vector<double> horizons_t = opts.horizons_t;
    std::vector<std::int64_t> late_kill(horizons_t.size(), 0);
    std::int64_t survivors = 0, accepted = 0, proposals = 0;
    // Welford moments of the tilted increment, for the truncation estimate.
    double inc_mean = 0.0, inc_m2 = 0.0;

    for (std::int64_t r = 0; r < opts.reps; ++r) {
        double walk = 0.0, fake_time = 0.0;
        bool killed = false;
        for (int k = 1; k <= opts.horizon; ++k) {
            TraversalPair w;
            while (true) {
                w = sample_pair(model, rng);
                ++proposals;
                if (uniform01(rng) < std::exp(-lambda * w.fake)) break;
            }
            ++accepted;
            const double inc = w.correct - w.fake;
            const double delta = inc - inc_mean;
            inc_mean += delta / static_cast<double>(accepted);
            inc_m2 += delta * (inc - inc_mean);
            walk += inc;
            fake_time += w.fake;
            if (walk < 0.0) {
                killed = true;
                break;
            }
        }
        if (!killed) {
            ++survivors;
            continue;
        }
        for (std::size_t i = 0; i < horizons_t.size(); ++i)
            if (fake_time > horizons_t[i]) ++late_kill[i];
    }

    const double reps = static_cast<double>(opts.reps);
    rep.p_star_hat = survivors / reps;
    rep.p_star_stderr = std::sqrt(rep.p_star_hat * (1.0 - rep.p_star_hat) / reps);
    for (std::size_t i = 0; i < horizons_t.size(); ++i)
        rep.p_star_t.emplace_back(horizons_t[i], rep.p_star_hat + late_kill[i] / reps);
    rep.proposals = proposals;
    rep.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposals);
    rep.acceptance_stderr = std::sqrt(rep.acceptance_rate * (1.0 - rep.acceptance_rate) / proposals);

    const double var = accepted > 1 ? inc_m2 / static_cast<double>(accepted - 1) : 0.0;
    if (inc_mean > 0.0 && var > 0.0)
        rep.truncation_bias_bound = rep.p_star_hat * std::exp(-2.0 * inc_mean * inc_mean * opts.horizon / var);
    else
        rep.truncation_bias_bound = rep.p_star_hat;
    return rep;
}

}  // namespace newsrace
