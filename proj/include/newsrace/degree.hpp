#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newsrace/random.hpp"

namespace newsrace {

/// A degree sequence ready for half-edge pairing: every entry >= 1 and an even
/// total. If the raw sum was odd the last entry carries one extra half-edge.
struct DegreeSequence {
    std::vector<int> d;
    std::int64_t total = 0;
    bool fix_applied = false;

    std::size_t n() const { return d.size(); }
};

/// Throws ZeroDegree for entries < 1 and std::invalid_argument for empty input.
DegreeSequence normalize_sequence(std::span<const int> raw);

/// Limiting degree law D. Either a finite-support law p_k (k >= 1) or the
/// discrete Pareto tail P(D >= k) = (min/k)^(tau-1) for k >= min.
class DegreeDistribution {
public:
    static DegreeDistribution finite(std::vector<std::pair<int, double>> pk);
    static DegreeDistribution regular(int r);
    static DegreeDistribution pareto_tail(double tau, int min_degree);
    static DegreeDistribution empirical(const DegreeSequence& seq);

    bool is_pareto() const { return pareto_; }
    double tau() const { return tau_; }
    int min_degree() const;

    double m1() const { return m1_; }
    double m2() const { return m2_; }  // +inf for pareto tails with tau <= 3
    double nu() const;
    bool d2logd_finite() const;

    /// Support and probabilities, finite-support laws only.
    const std::vector<std::pair<int, double>>& probabilities() const { return pk_; }

    int sample_degree(Stream& rng) const;

    /// Root draws from p_k; any other vertex draws D* - 1 with
    /// P(D* = k) = k p_k / E[D].
    int sample_offspring(bool is_root, Stream& rng) const;

    /// Non-random offspring count, if the law is a point mass. Used by the
    /// count-only branching of killed subtrees.
    std::optional<int> constant_offspring(bool is_root) const;

    std::string describe() const;

private:
    DegreeDistribution() = default;
    static int draw(const std::vector<std::pair<int, double>>& table, const std::vector<double>& cum, Stream& rng);

    bool pareto_ = false;
    double tau_ = 0.0;
    int min_ = 1;
    std::vector<std::pair<int, double>> pk_;
    std::vector<double> cum_;
    std::vector<double> biased_cum_;
    double m1_ = 0.0;
    double m2_ = 0.0;
};

double nu_of(const DegreeDistribution& dist);
double nu_of(const DegreeSequence& seq);

int sample_offspring(const DegreeDistribution& dist, bool is_root, Stream& rng);

struct RegularityReport {
    double mean = 0.0;
    double second_moment = 0.0;
    double declared_mean = 0.0;
    double declared_second_moment = 0.0;
    double mean_gap = 0.0;
    double second_moment_gap = 0.0;   // +inf when the declared moment is infinite
    bool second_moment_finite = true;  // declared family
    bool d2logd_finite = true;         // declared family
    bool min_degree_ok = true;         // every entry >= 2, i.e. F(1) = 0
};

RegularityReport regularity_report(const DegreeSequence& seq, const DegreeDistribution& declared);

/// Parsed form of `regular:<r>:<n>`, `iid:<pk-spec>:<n>`,
/// `pareto-degree:<tau>:<min>:<n>` or `file:<path>`. The trailing `:<n>` may be
/// omitted where a sweep supplies n. pk-spec is `k=p,k=p,...`; p may be a
/// fraction such as 1/3.
struct DegreeSpec {
    enum class Kind { Regular, Iid, ParetoDegree, File } kind = Kind::Regular;
    std::optional<DegreeDistribution> law;
    std::optional<std::size_t> n;
    std::string path;
    std::string text;

    static DegreeSpec parse(std::string_view spec);

    /// Declared limiting law; for files, the empirical law of the file.
    DegreeDistribution declared() const;

    /// Realizes a normalized sequence of size n (ignored for files).
    DegreeSequence realize(std::size_t n, Stream& rng) const;
};

std::vector<int> read_degree_file(const std::string& path);

}  // namespace newsrace
