#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "newsrace/random.hpp"

namespace newsrace {

struct Exponential {
    double rate;
};

struct Deterministic {
    double value;
};

struct Uniform {
    double lo;
    double hi;
};

struct Pareto {
    double shape;
    double scale;
};

/// Law of a single traversal time. Support is always a subset of [0, inf).
/// Construction validates the parameters and throws InvalidModel otherwise.
class Marginal {
public:
    using Law = std::variant<Exponential, Deterministic, Uniform, Pareto>;

    static Marginal exponential(double rate);
    static Marginal deterministic(double value);
    static Marginal uniform(double lo, double hi);
    static Marginal pareto(double shape, double scale);

    /// Parses `exp:<rate>`, `det:<value>`, `unif:<lo>:<hi>` or `pareto:<shape>:<scale>`.
    static Marginal parse(std::string_view spec);

    const Law& law() const { return law_; }

    template <class T>
    bool is() const {
        return std::holds_alternative<T>(law_);
    }

    double quantile(double u) const;
    /// Q(1 - a), accurate for small a.
    double quantile_complement(double a) const;
    double cdf(double x) const;
    double support_min() const;
    double support_max() const;  // +inf when unbounded
    bool bounded() const;

    std::string spec() const;

    friend bool operator==(const Marginal& a, const Marginal& b);

private:
    explicit Marginal(Law law) : law_(law) {}
    Law law_;
};

enum class Coupling { Independent, Comonotone, Countermonotone };

Coupling parse_coupling(std::string_view word);
std::string_view to_string(Coupling c);

/// Joint law of the per-edge pair (fake time, correct time).
struct JointTraversalModel {
    Marginal fake;
    Marginal correct;
    Coupling coupling = Coupling::Independent;
};

struct Feasibility {
    bool ok;
    std::string reason;
};

/// Decides P(L^F < L^R) > 0 for the declared coupling.
Feasibility check_feasibility(const JointTraversalModel& model);

/// Throws InvalidModel when the model fails check_feasibility.
void require_feasible(const JointTraversalModel& model);

struct TraversalPair {
    double fake;
    double correct;
};

TraversalPair sample_pair(const JointTraversalModel& model, Stream& rng);

double mean(const Marginal& m);

/// E[exp(s L)], or +inf where it diverges.
double mgf(const Marginal& m, double s);

/// E[exp(s (L^R - L^F))], or +inf where it diverges.
double psi(const JointTraversalModel& model, double s);

/// Whether psi(model, s) is finite, decided from the tail families of the two
/// marginals under the coupling (never from numerical overflow).
bool psi_finite(const JointTraversalModel& model, double s);

/// sup{ s >= 0 : psi(s) < inf }. Zero when psi diverges for every s > 0.
/// psi is infinite at the abscissa itself for every supported family pair.
double psi_abscissa(const JointTraversalModel& model);

}  // namespace newsrace
