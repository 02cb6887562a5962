#include <cmath>
#include <limits>
#include <vector>

#include "constructed.hpp"
#include "doctest.h"
#include "newsrace/errors.hpp"
#include "newsrace/survival_theory.hpp"
#include "support.hpp"

using namespace newsrace;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

JointTraversalModel indep(Marginal f, Marginal r) { return {f, r, Coupling::Independent}; }

// Plain bisection of g(lambda) = E[e^{-lambda L}] - 1/nu on a fixed bracket.
template <class Laplace>
double bisect_root(Laplace laplace, double nu, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (laplace(mid) > 1.0 / nu ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Marginal scaled(const Marginal& m, double c) {
    if (auto* e = std::get_if<Exponential>(&m.law())) return Marginal::exponential(e->rate / c);
    if (auto* d = std::get_if<Deterministic>(&m.law())) return Marginal::deterministic(d->value * c);
    if (auto* u = std::get_if<Uniform>(&m.law())) return Marginal::uniform(u->lo * c, u->hi * c);
    auto p = std::get<Pareto>(m.law());
    return Marginal::pareto(p.shape, p.scale * c);
}
}  // namespace

TEST_CASE("solve_rho examples") {
    auto r = solve_rho(indep(Marginal::exponential(1), Marginal::exponential(3)));
    CHECK(r.status == RhoStatus::InteriorMin);
    CHECK(std::abs(r.h - 1.0) < 1e-6);
    CHECK(r.rho == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.s_max == 3.0);

    auto same = solve_rho(indep(Marginal::deterministic(2), Marginal::deterministic(2)));
    CHECK(same.status == RhoStatus::InteriorMin);
    CHECK(same.rho == 1.0);
    CHECK(same.h == 0.0);

    auto heavy = solve_rho(indep(Marginal::deterministic(1), Marginal::pareto(2.5, 0.1)));
    CHECK(heavy.status == RhoStatus::DivergentAll);
    CHECK(heavy.s_max == 0.0);

    auto drift = solve_rho(indep(Marginal::exponential(1), Marginal::exponential(0.5)));
    CHECK(drift.status == RhoStatus::DriftPositive);
    CHECK(std::isnan(drift.rho));
}

TEST_CASE("property: closed-form rho for exponential pairs") {
    Stream rng = make_stream(1);
    for (int i = 0; i < 50; ++i) {
        const double mf = testgen::uniform(rng, 0.1, 5), mr = mf * testgen::uniform(rng, 1.01, 10);
        auto r = solve_rho(indep(Marginal::exponential(mf), Marginal::exponential(mr)));
        REQUIRE(r.status == RhoStatus::InteriorMin);
        CHECK(std::abs(r.rho - 4 * mr * mf / ((mr + mf) * (mr + mf))) < 1e-8);
        CHECK(std::abs(r.h - (mr - mf) / 2) < 1e-6);
        CHECK(r.h < r.s_max);
    }
}

TEST_CASE("property: InteriorMin minimizer satisfies convexity shape") {
    Stream rng = make_stream(2);
    int seen = 0;
    for (int i = 0; i < 80 && seen < 20; ++i) {
        JointTraversalModel m{testgen::light_marginal(rng), testgen::light_marginal(rng), testgen::coupling(rng)};
        if (!check_feasibility(m).ok) continue;
        auto r = solve_rho(m);
        if (r.status != RhoStatus::InteriorMin) continue;
        ++seen;
        INFO(m.fake.spec() << " " << m.correct.spec() << " " << to_string(m.coupling));
        CHECK(r.h >= 0.0);
        CHECK(r.h < r.s_max);
        for (double t : {0.0, 0.25, 0.5, 0.75}) CHECK(psi(m, t * r.h) >= r.rho - 1e-9);
        for (double t : {1.1, 1.5, 2.0})
            if (t * r.h < r.s_max) CHECK(psi(m, t * r.h) >= r.rho - 1e-9);
    }
    CHECK(seen > 5);
}

TEST_CASE("BoundaryNotCovered on a constructed transform") {
    auto t = constructed::boundary_transform();
    auto r = minimize_transform(t);
    CHECK(r.status == RhoStatus::BoundaryNotCovered);
    CHECK(r.h == 1.0);
    CHECK(std::isfinite(r.rho));
    CHECK(r.rho < t.value(0.9));
    auto v = classify_weak(constructed::mean_x(), 0.0, r, 2.0);
    CHECK(v.outcome == WeakOutcome::NotCovered);
    CHECK(v.label() == "NotCovered");

    // an exponential transform passed through the same entry point
    Transform exp_t{[](double s) { return psi(indep(Marginal::exponential(1), Marginal::exponential(3)), s); }, 3.0};
    auto e = minimize_transform(exp_t);
    CHECK(e.status == RhoStatus::InteriorMin);
    CHECK(e.rho == doctest::Approx(0.75));
    CHECK(minimize_transform({[](double) { return kInf; }, 0.0}).status == RhoStatus::DivergentAll);
}

TEST_CASE("solve_malthusian examples") {
    CHECK(solve_malthusian(Marginal::exponential(1), 2).lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(solve_malthusian(Marginal::deterministic(1), 2).lambda == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const double oracle =
        bisect_root([](double l) { return (1 - std::exp(-l)) / l; }, 2.0, 1e-9, 50.0);
    const double got = solve_malthusian(Marginal::uniform(0, 1), 2).lambda;
    CHECK(std::abs(got - oracle) < 1e-10);
    CHECK(got == doctest::Approx(1.59362).epsilon(1e-5));

    CHECK_THROWS_AS(solve_malthusian(Marginal::deterministic(0), 2), NoRoot);
    CHECK_THROWS_AS(solve_malthusian(Marginal::exponential(1), 1.0), NoRoot);
    CHECK_THROWS_AS(solve_malthusian(Marginal::exponential(1), kInf), NoRoot);
    CHECK_NOTHROW(solve_malthusian(Marginal::uniform(0, 1), 1.01));
}

TEST_CASE("property: Malthusian residual below tolerance and increasing in nu") {
    Stream rng = make_stream(3);
    for (int i = 0; i < 30; ++i) {
        auto m = testgen::continuous_marginal(rng);
        double prev = 0;
        for (double nu : {1.2, 1.5, 2.0, 3.0, 5.0, 10.0}) {
            auto rep = solve_malthusian(m, nu, 1e-12);
            INFO(m.spec() << " nu=" << nu);
            CHECK(rep.residual <= 1e-12);
            CHECK(rep.lambda > prev);
            prev = rep.lambda;
        }
    }
}

TEST_CASE("classify_weak examples") {
    auto a = classify_weak(indep(Marginal::exponential(1), Marginal::exponential(0.5)), 2);
    CHECK(a.label() == "Survives(i)");
    CHECK(a.mean_correct == 2.0);

    auto b = classify_weak(indep(Marginal::exponential(1), Marginal::exponential(10)), 2);
    CHECK(b.label() == "Dies(ii)");
    CHECK(b.rho.rho == doctest::Approx(40.0 / 121.0).epsilon(1e-10));

    auto c = classify_weak(indep(Marginal::exponential(1), Marginal::exponential(1)), 2);
    CHECK(c.label() == "Survives(ii)");
    CHECK(c.rho.rho == doctest::Approx(1.0));

    auto d = classify_weak(indep(Marginal::exponential(1), Marginal::pareto(1.5, 0.2)), 2);
    CHECK(d.label() == "Survives(iii)");
    CHECK(d.mean_correct <= d.mean_fake);

    auto e = classify_weak(indep(Marginal::exponential(1), Marginal::exponential(10)), kInf);
    CHECK(e.label() == "Survives(infinite-nu)");
    CHECK_THROWS(classify_weak(indep(Marginal::exponential(1), Marginal::exponential(10)), 1.0));
}

TEST_CASE("classify_strong examples") {
    auto dies = classify_strong_graph(indep(Marginal::exponential(1), Marginal::exponential(2)), 2);
    CHECK(dies.outcome == StrongOutcome::Dies);
    CHECK(dies.lambda_fake == doctest::Approx(1.0));
    CHECK(dies.lambda_correct == doctest::Approx(2.0));
    CHECK(classify_strong_graph(indep(Marginal::exponential(1), Marginal::exponential(0.5)), 2).outcome ==
          StrongOutcome::Survives);
    CHECK(classify_strong_graph(indep(Marginal::exponential(1), Marginal::exponential(1)), 2).outcome ==
          StrongOutcome::Boundary);
    CHECK_THROWS_AS(classify_strong_graph(indep(Marginal::deterministic(0), Marginal::exponential(1)), 2), NoRoot);

    CHECK(classify_strong_tree(indep(Marginal::deterministic(1), Marginal::deterministic(2))).outcome ==
          StrongOutcome::Survives);
    CHECK(classify_strong_tree(indep(Marginal::deterministic(2), Marginal::deterministic(1))).outcome ==
          StrongOutcome::Dies);
    CHECK(classify_strong_tree(indep(Marginal::exponential(1), Marginal::uniform(0, 2))).outcome ==
          StrongOutcome::Dies);
}

TEST_CASE("property: verdicts invariant under a common change of time unit") {
    Stream rng = make_stream(4);
    for (int i = 0; i < 40; ++i) {
        JointTraversalModel m{testgen::light_marginal(rng), testgen::light_marginal(rng), testgen::coupling(rng)};
        if (!check_feasibility(m).ok) continue;
        const double c = testgen::uniform(rng, 0.1, 10);
        JointTraversalModel ms{scaled(m.fake, c), scaled(m.correct, c), m.coupling};
        const double nu = testgen::uniform(rng, 1.2, 4);
        INFO(m.fake.spec() << " " << m.correct.spec() << " " << to_string(m.coupling) << " c=" << c);
        CHECK(classify_weak(m, nu).label() == classify_weak(ms, nu).label());
        auto s1 = classify_strong_graph(m, nu), s2 = classify_strong_graph(ms, nu);
        CHECK(s1.outcome == s2.outcome);
        CHECK(s2.lambda_fake == doctest::Approx(s1.lambda_fake / c).epsilon(1e-9));
        CHECK(s2.lambda_correct == doctest::Approx(s1.lambda_correct / c).epsilon(1e-9));
    }
}

TEST_CASE("property: lambda^F > lambda^R with independent or countermonotone coupling gives rho > 1/nu") {
    Stream rng = make_stream(5);
    int interior = 0;
    for (int i = 0; i < 1500; ++i) {
        const auto c = testgen::integer(rng, 0, 1) ? Coupling::Independent : Coupling::Countermonotone;
        JointTraversalModel m{testgen::light_marginal(rng), testgen::light_marginal(rng), c};
        if (!check_feasibility(m).ok) continue;
        const double nu = testgen::uniform(rng, 1.2, 5);
        const auto s = classify_strong_graph(m, nu);
        if (!(s.lambda_fake > s.lambda_correct)) continue;
        const auto r = solve_rho(m);
        if (r.status != RhoStatus::InteriorMin) continue;
        ++interior;
        INFO(m.fake.spec() << " " << m.correct.spec() << " " << to_string(c) << " nu=" << nu);
        CHECK(r.rho > 1.0 / nu);
    }
    CHECK(interior > 10);
}

TEST_CASE("stable-age examples") {
    const auto m = indep(Marginal::exponential(1), Marginal::exponential(0.6));
    const double lambda = solve_malthusian(m.fake, 2).lambda;
    CHECK(stable_age_mean(m.fake, 2, lambda) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tilted_correct_mean(m, 2, lambda) == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
    CHECK(lifetime_profile(m.fake, lambda, kInf) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lifetime_profile(m.fake, lambda, std::log(2.0)) == doctest::Approx(0.25).epsilon(1e-12));

    Stream rng = make_stream(6);
    StableAgeOptions opts;
    opts.reps = 200;
    opts.horizon = 500;
    opts.horizons_t = {1.0, 10.0};
    auto rep = stable_age_report(indep(Marginal::deterministic(1), Marginal::deterministic(2)), 2, opts, rng);
    CHECK(rep.p_star_hat == 1.0);
    for (auto [t, p] : rep.p_star_t) CHECK(p == 1.0);
}

TEST_CASE("stable-age mean by numeric differentiation matches closed forms") {
    // Pareto goes through central differences; compare with a direct integral
    // E[L e^{-lambda L}] = int a x^a y^{-a} e^{-lambda y} dy.
    for (auto [a, x] : {std::pair{2.5, 1.0}, {1.5, 0.5}, {4.0, 2.0}}) {
        auto m = Marginal::pareto(a, x);
        const double nu = 2.0;
        const double lambda = solve_malthusian(m, nu).lambda;
        const int n = 400000;
        const double ymax = 80.0 / lambda + 50 * x;
        const double h = (ymax - x) / n;
        double sum = 0;
        for (int i = 0; i <= n; ++i) {
            const double y = x + i * h;
            const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
            sum += w * a * std::pow(x, a) * std::pow(y, -a) * std::exp(-lambda * y);
        }
        const double expect = nu * sum * h / 3;
        INFO("a=" << a << " x=" << x);
        CHECK(stable_age_mean(m, nu, lambda) == doctest::Approx(expect).epsilon(1e-7));
    }
    // Uniform and deterministic closed forms against the derivative identity
    auto u = Marginal::uniform(0.5, 2.0);
    const double lu = solve_malthusian(u, 3).lambda;
    const double hstep = 1e-5;
    const double fd = (mgf(u, -lu + hstep) - mgf(u, -lu - hstep)) / (2 * hstep);
    CHECK(stable_age_mean(u, 3, lu) == doctest::Approx(3 * fd).epsilon(1e-8));
    CHECK(stable_age_mean(Marginal::deterministic(1.5), 2, std::log(2.0) / 1.5) ==
          doctest::Approx(2 * 1.5 * 0.5).epsilon(1e-12));
}

TEST_CASE("tilted correct mean under couplings") {
    const double nu = 2;
    // comonotone Exp(1) fake / Exp(0.5) correct: L^R = 2 L^F
    JointTraversalModel co{Marginal::exponential(1), Marginal::exponential(0.5), Coupling::Comonotone};
    const double l = solve_malthusian(co.fake, nu).lambda;
    CHECK(tilted_correct_mean(co, nu, l) == doctest::Approx(2 * stable_age_mean(co.fake, nu, l)).epsilon(1e-9));
    // countermonotone Uniform(0,1) pair: E[(1-U) e^{-l U}]
    JointTraversalModel cm{Marginal::uniform(0, 1), Marginal::uniform(0, 1), Coupling::Countermonotone};
    const double lu = solve_malthusian(cm.fake, nu).lambda;
    const double expect = nu * ((1 - std::exp(-lu)) / lu - (1 / (lu * lu) - (1 / lu + 1 / (lu * lu)) * std::exp(-lu)));
    CHECK(tilted_correct_mean(cm, nu, lu) == doctest::Approx(expect).epsilon(1e-9));
    JointTraversalModel dd{Marginal::deterministic(1), Marginal::deterministic(3), Coupling::Comonotone};
    CHECK(tilted_correct_mean(dd, nu, std::log(2.0)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("property: lifetime profile") {
    Stream rng = make_stream(7);
    for (int i = 0; i < 30; ++i) {
        auto m = testgen::continuous_marginal(rng);
        const double nu = testgen::uniform(rng, 1.3, 4);
        const double lambda = solve_malthusian(m, nu).lambda;
        INFO(m.spec() << " nu=" << nu);
        CHECK(std::abs(lifetime_profile(m, lambda, kInf) - (1 - 1 / nu) / lambda) < 1e-9);
        CHECK(std::abs(lifetime_profile_quadrature(m, lambda, kInf) - (1 - 1 / nu) / lambda) < 1e-9);
        double prev = 0;
        for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
            const double h = lifetime_profile(m, lambda, x);
            CHECK(h >= prev - 1e-15);
            prev = h;
        }
        if (auto* e = std::get_if<Exponential>(&m.law()))
            for (double x : {0.1, 0.7, 3.0})
                CHECK(std::abs(lifetime_profile_quadrature(m, lambda, x) - (1 - std::exp(-e->rate * x)) / (lambda + e->rate)) <
                      1e-8);
    }
    auto d = Marginal::deterministic(1);
    CHECK(std::abs(lifetime_profile(d, std::log(2.0), 0.4) - lifetime_profile_quadrature(Marginal::uniform(0.999999, 1.000001), std::log(2.0), 0.4)) < 1e-5);
}

TEST_CASE("property: stable-age lemma on exponential pairs") {
    Stream rng = make_stream(8);
    for (int i = 0; i < 100; ++i) {
        const double mf = testgen::uniform(rng, 0.2, 5), mr = mf * testgen::uniform(rng, 0.05, 0.99);
        const double nu = testgen::uniform(rng, 1.2, 6);
        auto m = indep(Marginal::exponential(mf), Marginal::exponential(mr));
        const double l = solve_malthusian(m.fake, nu).lambda;
        CHECK(tilted_correct_mean(m, nu, l) - stable_age_mean(m.fake, nu, l) > 1e-6);
    }
}

TEST_CASE("tilted sampling: acceptance rate and p*_T ordering") {
    Stream rng = make_stream(9);
    StableAgeOptions opts;
    opts.reps = 4000;
    opts.horizon = 400;
    opts.horizons_t = {0.5, 2.0, 10.0, 1e9};
    opts.h_grid = {0.0, 1.0, kInf};
    auto rep = stable_age_report(indep(Marginal::exponential(1), Marginal::exponential(0.6)), 2, opts, rng);
    CHECK(std::abs(rep.acceptance_rate - 0.5) < 3 * rep.acceptance_stderr);
    CHECK(rep.p_star_hat > 0.0);
    CHECK(rep.p_star_hat < 1.0);
    double prev = 1.0;
    for (auto [t, p] : rep.p_star_t) {
        CHECK(p >= rep.p_star_hat);
        CHECK(p <= prev);
        prev = p;
    }
    CHECK(rep.p_star_t.back().second == rep.p_star_hat);
    CHECK(rep.truncation_bias_bound >= 0.0);
    CHECK(rep.h_values.size() == 3);
    CHECK(rep.h_values[2].second == doctest::Approx(0.5));
}
