#include "newsrace/traversal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "newsrace/errors.hpp"
#include "quadrature.hpp"

namespace newsrace {

namespace {

// Quantile at driver value u = 1 - a, using whichever coordinate is exact.
double q(const Marginal& m, double u, double a) { return u <= 0.5 ? m.quantile(u) : m.quantile_complement(a); }

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxU = 1.0 - 0x1.0p-53;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(std::string_view text, std::string_view spec) {
    std::string buf(text);
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v))
        throw InvalidModel("bad number '" + buf + "' in distribution spec '" + std::string(spec) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Growth of the quantile function near u -> 1, written in a = 1 - u.
struct Tail {
    enum Kind { Bounded, Log, Power } kind;
    double coef = 0.0;  // Log: 1/rate ; Power: scale
    double expo = 0.0;  // Power: 1/shape
};

Tail upper_tail(const Marginal& m) {
    return std::visit(overloaded{
                          [](const Exponential& e) { return Tail{Tail::Log, 1.0 / e.rate, 0.0}; },
                          [](const Pareto& p) { return Tail{Tail::Power, p.scale, 1.0 / p.shape}; },
                          [](const auto&) { return Tail{Tail::Bounded}; },
                      },
                      m.law());
}

// Is int_0 exp(s * (plus(a) - minus(a))) da finite near a = 0, for s > 0?
bool tail_integrable(double s, const Tail& plus, const Tail& minus) {
    switch (plus.kind) {
        case Tail::Bounded:
            return true;
        case Tail::Log:
            switch (minus.kind) {
                case Tail::Bounded:
                    return s * plus.coef < 1.0;
                case Tail::Log:
                    return s * (plus.coef - minus.coef) < 1.0;
                case Tail::Power:
                    return true;
            }
            break;
        case Tail::Power:
            if (minus.kind != Tail::Power) return false;
            if (plus.expo != minus.expo) return plus.expo < minus.expo;
            return plus.coef <= minus.coef;
    }
    return false;
}

// Largest s for which the same integral stays finite (+inf when always finite).
double tail_abscissa(const Tail& plus, const Tail& minus) {
    switch (plus.kind) {
        case Tail::Bounded:
            return kInf;
        case Tail::Log:
            switch (minus.kind) {
                case Tail::Bounded:
                    return 1.0 / plus.coef;
                case Tail::Log:
                    return plus.coef > minus.coef ? 1.0 / (plus.coef - minus.coef) : kInf;
                case Tail::Power:
                    return kInf;
            }
            break;
        case Tail::Power:
            return tail_integrable(1.0, plus, minus) ? kInf : 0.0;
    }
    return 0.0;
}

}  // namespace

Marginal Marginal::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidModel("exponential rate must be > 0");
    return Marginal(Exponential{rate});
}

Marginal Marginal::deterministic(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw InvalidModel("deterministic value must be >= 0");
    return Marginal(Deterministic{value});
}

Marginal Marginal::uniform(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) throw InvalidModel("uniform needs 0 <= lo < hi");
    return Marginal(Uniform{lo, hi});
}

Marginal Marginal::pareto(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
        throw InvalidModel("pareto needs shape > 0 and scale > 0");
    return Marginal(Pareto{shape, scale});
}

Marginal Marginal::parse(std::string_view spec) {
    auto parts = split(spec, ':');
    const auto& family = parts[0];
    auto want = [&](std::size_t n) {
        if (parts.size() != n + 1)
            throw InvalidModel("distribution spec '" + std::string(spec) + "' expects " + std::to_string(n) +
                               " parameter(s)");
    };
    if (family == "exp") {
        want(1);
        return exponential(parse_number(parts[1], spec));
    }
    if (family == "det") {
        want(1);
        return deterministic(parse_number(parts[1], spec));
    }
    if (family == "unif") {
        want(2);
        return uniform(parse_number(parts[1], spec), parse_number(parts[2], spec));
    }
    if (family == "pareto") {
        want(2);
        return pareto(parse_number(parts[1], spec), parse_number(parts[2], spec));
    }
    throw InvalidModel("unknown distribution family in '" + std::string(spec) + "'");
}

double Marginal::quantile(double u) const {
    u = std::clamp(u, 0.0, kMaxU);
    return std::visit(overloaded{
                          [u](const Exponential& e) { return -std::log1p(-u) / e.rate; },
                          [](const Deterministic& d) { return d.value; },
                          [u](const Uniform& un) { return un.lo + (un.hi - un.lo) * u; },
                          [u](const Pareto& p) { return p.scale * std::pow(1.0 - u, -1.0 / p.shape); },
                      },
                      law_);
}

double Marginal::quantile_complement(double a) const {
    a = std::clamp(a, 0x1.0p-1074, 1.0);
    return std::visit(overloaded{
                          [a](const Exponential& e) { return -std::log(a) / e.rate; },
                          [](const Deterministic& d) { return d.value; },
                          [a](const Uniform& un) { return un.hi - (un.hi - un.lo) * a; },
                          [a](const Pareto& p) { return p.scale * std::pow(a, -1.0 / p.shape); },
                      },
                      law_);
}

double Marginal::cdf(double x) const {
    return std::visit(overloaded{
                          [x](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.rate * x); },
                          [x](const Deterministic& d) { return x >= d.value ? 1.0 : 0.0; },
                          [x](const Uniform& un) { return std::clamp((x - un.lo) / (un.hi - un.lo), 0.0, 1.0); },
                          [x](const Pareto& p) { return x <= p.scale ? 0.0 : 1.0 - std::pow(p.scale / x, p.shape); },
                      },
                      law_);
}

double Marginal::support_min() const {
    return std::visit(overloaded{
                          [](const Exponential&) { return 0.0; },
                          [](const Deterministic& d) { return d.value; },
                          [](const Uniform& un) { return un.lo; },
                          [](const Pareto& p) { return p.scale; },
                      },
                      law_);
}

double Marginal::support_max() const {
    return std::visit(overloaded{
                          [](const Deterministic& d) { return d.value; },
                          [](const Uniform& un) { return un.hi; },
                          [](const auto&) { return kInf; },
                      },
                      law_);
}

bool Marginal::bounded() const { return std::isfinite(support_max()); }

std::string Marginal::spec() const {
    return std::visit(overloaded{
                          [](const Exponential& e) { return "exp:" + fmt_double(e.rate); },
                          [](const Deterministic& d) { return "det:" + fmt_double(d.value); },
                          [](const Uniform& u) { return "unif:" + fmt_double(u.lo) + ":" + fmt_double(u.hi); },
                          [](const Pareto& p) { return "pareto:" + fmt_double(p.shape) + ":" + fmt_double(p.scale); },
                      },
                      law_);
}

bool operator==(const Marginal& a, const Marginal& b) {
    if (a.law_.index() != b.law_.index()) return false;
    return std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.law_);
            if constexpr (std::is_same_v<T, Exponential>) return x.rate == y.rate;
            if constexpr (std::is_same_v<T, Deterministic>) return x.value == y.value;
            if constexpr (std::is_same_v<T, Uniform>) return x.lo == y.lo && x.hi == y.hi;
            if constexpr (std::is_same_v<T, Pareto>) return x.shape == y.shape && x.scale == y.scale;
        },
        a.law_);
}

Coupling parse_coupling(std::string_view word) {
    if (word == "independent") return Coupling::Independent;
    if (word == "comonotone") return Coupling::Comonotone;
    if (word == "countermonotone") return Coupling::Countermonotone;
    throw InvalidModel("unknown coupling '" + std::string(word) + "'");
}

std::string_view to_string(Coupling c) {
    switch (c) {
        case Coupling::Independent:
            return "independent";
        case Coupling::Comonotone:
            return "comonotone";
        case Coupling::Countermonotone:
            return "countermonotone";
    }
    return "?";
}

Feasibility check_feasibility(const JointTraversalModel& model) {
    const auto& f = model.fake;
    const auto& r = model.correct;
    if (model.coupling == Coupling::Comonotone) {
        if (f == r) return {false, "L^F = L^R a.s."};
        // g(u) = Q_R(u) - Q_F(u) is continuous on (0,1), so {g > 0} has positive
        // measure iff g is positive somewhere. Check both end limits first.
        const Tail tr = upper_tail(r), tf = upper_tail(f);
        const bool upper_positive = [&] {
            if (tr.kind == Tail::Bounded && tf.kind == Tail::Bounded) return r.support_max() > f.support_max();
            if (tr.kind == Tail::Bounded) return false;
            if (tf.kind == Tail::Bounded) return true;
            if (tr.kind != tf.kind) return tr.kind == Tail::Power;
            if (tr.kind == Tail::Log) return tr.coef > tf.coef;
            if (tr.expo != tf.expo) return tr.expo > tf.expo;
            return tr.coef > tf.coef;
        }();
        if (upper_positive || r.support_min() > f.support_min()) return {true, "comonotone quantiles cross"};
        double best = r.support_min() - f.support_min();
        // Interior: the quantile differences of these families change sign at most
        // twice, so a grid dense near both ends (in log scale) locates any bump.
        for (int i = 1; i < 4000; ++i) {
            double t = i / 4000.0;
            double lo = std::pow(1e-12, 1.0 - t);  // 1e-12 .. 1
            for (double u : {0.5 * lo, 1.0 - 0.5 * lo}) {
                double g = r.quantile(u) - f.quantile(u);
                best = std::max(best, g);
                if (g > 0.0) return {true, "comonotone quantiles cross"};
            }
        }
        return {false, best < 0.0 ? "L^F > L^R a.s." : "L^F >= L^R a.s."};
    }
    // Independent and countermonotone: sup of L^R - L^F is support_max(R) - support_min(F),
    // reached on a set of positive measure whenever it is positive.
    const double gap = r.support_max() - f.support_min();
    if (gap > 0.0) return {true, "supports overlap"};
    return {false, gap < 0.0 ? "L^F > L^R a.s." : "L^F >= L^R a.s."};
}

void require_feasible(const JointTraversalModel& model) {
    auto feas = check_feasibility(model);
    if (!feas.ok) throw InvalidModel("infeasible traversal model: " + feas.reason);
}

TraversalPair sample_pair(const JointTraversalModel& model, Stream& rng) {
    const double u = uniform01(rng);
    switch (model.coupling) {
        case Coupling::Independent: {
            const double v = uniform01(rng);
            return {model.fake.quantile(u), model.correct.quantile(v)};
        }
        case Coupling::Comonotone:
            return {model.fake.quantile(u), model.correct.quantile(u)};
        case Coupling::Countermonotone:
            return {model.fake.quantile(u), model.correct.quantile_complement(u)};
    }
    return {};
}

double mean(const Marginal& m) {
    return std::visit(overloaded{
                          [](const Exponential& e) { return 1.0 / e.rate; },
                          [](const Deterministic& d) { return d.value; },
                          [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                          [](const Pareto& p) { return p.shape > 1.0 ? p.shape * p.scale / (p.shape - 1.0) : kInf; },
                      },
                      m.law());
}

double mgf(const Marginal& m, double s) {
    if (s == 0.0) return 1.0;
    return std::visit(overloaded{
                          [s](const Exponential& e) { return s < e.rate ? e.rate / (e.rate - s) : kInf; },
                          [s](const Deterministic& d) { return std::exp(s * d.value); },
                          [s](const Uniform& u) {
                              // (e^{sb} - e^{sa}) / (s (b - a)), written to stay accurate for small s(b-a).
                              const double w = u.hi - u.lo;
                              return std::exp(s * u.lo) * std::expm1(s * w) / (s * w);
                          },
                          [s, &m](const Pareto&) {
                              if (s > 0.0) return kInf;
                              return detail::integrate_driver(
                                  [&](double u, double a) { return std::exp(s * q(m, u, a)); });
                          },
                      },
                      m.law());
}

bool psi_finite(const JointTraversalModel& model, double s) {
    if (s == 0.0) return true;
    const Tail tr = upper_tail(model.correct), tf = upper_tail(model.fake);
    const Tail none{Tail::Bounded};
    // Exponent s * (Q_R - Q_F); for s < 0 the roles of the coordinates swap.
    const double a = std::abs(s);
    switch (model.coupling) {
        case Coupling::Independent:
        case Coupling::Countermonotone:
            // The two tails never sit at the same end of the driver.
            return s > 0.0 ? tail_integrable(a, tr, none) : tail_integrable(a, tf, none);
        case Coupling::Comonotone:
            return s > 0.0 ? tail_integrable(a, tr, tf) : tail_integrable(a, tf, tr);
    }
    return false;
}

double psi_abscissa(const JointTraversalModel& model) {
    const Tail tr = upper_tail(model.correct), tf = upper_tail(model.fake);
    if (model.coupling == Coupling::Comonotone) return tail_abscissa(tr, tf);
    return tail_abscissa(tr, Tail{Tail::Bounded});
}

double psi(const JointTraversalModel& model, double s) {
    if (s == 0.0) return 1.0;
    if (!psi_finite(model, s)) return kInf;
    const auto& f = model.fake;
    const auto& r = model.correct;
    if (model.coupling == Coupling::Independent) return mgf(r, s) * mgf(f, -s);
    if (f.is<Deterministic>() && r.is<Deterministic>()) return std::exp(s * (r.support_min() - f.support_min()));
    if (model.coupling == Coupling::Comonotone)
        return detail::integrate_driver(
            [&](double u, double a) { return std::exp(s * (q(r, u, a) - q(f, u, a))); });
    return detail::integrate_driver([&](double u, double a) { return std::exp(s * (q(r, a, u) - q(f, u, a))); });
}

}  // namespace newsrace
