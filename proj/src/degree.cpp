#include "newsrace/degree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "newsrace/errors.hpp"

namespace newsrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDegree = 1 << 30;

// sum_{k > N} k^{-a}, a > 1, by Euler-Maclaurin.
double zeta_tail(double a, double N) {
    return std::pow(N, 1.0 - a) / (a - 1.0) - 0.5 * std::pow(N, -a) + a * std::pow(N, -a - 1.0) / 12.0 -
           a * (a + 1.0) * (a + 2.0) * std::pow(N, -a - 3.0) / 720.0;
}

double parse_value(std::string_view text, std::string_view spec) {
    std::string buf(text);
    auto slash = buf.find('/');
    auto num = [&](const std::string& s) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
            throw ConfigError("bad number '" + s + "' in degree spec '" + std::string(spec) + "'");
        return v;
    };
    if (slash == std::string::npos) return num(buf);
    return num(buf.substr(0, slash)) / num(buf.substr(slash + 1));
}

std::size_t parse_count(std::string_view text, std::string_view spec) {
    double v = parse_value(text, spec);
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("bad count in degree spec '" + std::string(spec) + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

DegreeSequence normalize_sequence(std::span<const int> raw) {
    if (raw.empty()) throw std::invalid_argument("empty degree sequence");
    DegreeSequence seq;
    seq.d.assign(raw.begin(), raw.end());
    for (std::size_t i = 0; i < seq.d.size(); ++i) {
        if (seq.d[i] < 1) throw ZeroDegree("degree of vertex " + std::to_string(i) + " is " + std::to_string(seq.d[i]));
        seq.total += seq.d[i];
    }
    if (seq.total % 2 != 0) {
        seq.d.back() += 1;
        seq.total += 1;
        seq.fix_applied = true;
    }
    return seq;
}

DegreeDistribution DegreeDistribution::finite(std::vector<std::pair<int, double>> pk) {
    std::map<int, double> merged;
    for (auto [k, p] : pk) {
        if (k < 1) throw ZeroDegree("degree law puts mass on k = " + std::to_string(k));
        if (!(p >= 0.0)) throw std::invalid_argument("negative probability in degree law");
        if (p > 0.0) merged[k] += p;
    }
    double sum = 0.0;
    for (auto& [k, p] : merged) sum += p;
    if (merged.empty() || std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("degree probabilities must sum to 1");

    DegreeDistribution dist;
    dist.pk_.assign(merged.begin(), merged.end());
    double acc = 0.0, m1 = 0.0, m2 = 0.0;
    for (auto [k, p] : dist.pk_) {
        acc += p;
        dist.cum_.push_back(acc);
        m1 += k * p;
        m2 += double(k) * k * p;
    }
    dist.m1_ = m1;
    dist.m2_ = m2;
    acc = 0.0;
    for (auto [k, p] : dist.pk_) {
        acc += k * p / m1;
        dist.biased_cum_.push_back(acc);
    }
    dist.min_ = dist.pk_.front().first;
    return dist;
}

DegreeDistribution DegreeDistribution::regular(int r) { return finite({{r, 1.0}}); }

DegreeDistribution DegreeDistribution::pareto_tail(double tau, int min_degree) {
    if (!(tau > 1.0)) throw std::invalid_argument("pareto degree exponent must exceed 1");
    if (min_degree < 1) throw ZeroDegree("pareto degree minimum must be >= 1");
    DegreeDistribution dist;
    dist.pareto_ = true;
    dist.tau_ = tau;
    dist.min_ = min_degree;
    const double a = tau - 1.0;
    const double mn = min_degree;
    // E[D] = sum_{k>=1} P(D >= k), E[D^2] = sum_{k>=1} (2k - 1) P(D >= k).
    if (a > 1.0) {
        constexpr int N = 100000;
        double s1 = 0.0;
        for (int k = N; k > min_degree; --k) s1 += std::pow(k, -a);
        s1 += zeta_tail(a, N);
        dist.m1_ = mn + std::pow(mn, a) * s1;
    } else {
        dist.m1_ = kInf;
    }
    if (a > 2.0) {
        constexpr int N = 100000;
        double s = 0.0, s1 = 0.0;
        for (int k = N; k > min_degree; --k) {
            s += std::pow(k, 1.0 - a);
            s1 += std::pow(k, -a);
        }
        s += zeta_tail(a - 1.0, N);
        s1 += zeta_tail(a, N);
        dist.m2_ = mn * mn + std::pow(mn, a) * (2.0 * s - s1);
    } else {
        dist.m2_ = kInf;
    }
    return dist;
}

DegreeDistribution DegreeDistribution::empirical(const DegreeSequence& seq) {
    std::map<int, std::size_t> counts;
    for (int k : seq.d) ++counts[k];
    std::vector<std::pair<int, double>> pk;
    const double n = static_cast<double>(seq.n());
    double acc = 0.0;
    for (auto [k, c] : counts) {
        pk.emplace_back(k, c / n);
        acc += c / n;
    }
    // Normalize rounding so the 1e-12 check cannot trip on long sequences.
    for (auto& [k, p] : pk) p /= acc;
    return finite(std::move(pk));
}

int DegreeDistribution::min_degree() const { return min_; }

double DegreeDistribution::nu() const {
    if (!std::isfinite(m2_)) return kInf;
    return (m2_ - m1_) / m1_;
}

bool DegreeDistribution::d2logd_finite() const { return !pareto_ || tau_ > 3.0; }

int DegreeDistribution::draw(const std::vector<std::pair<int, double>>& table, const std::vector<double>& cum,
                             Stream& rng) {
    const double u = uniform01(rng) * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), table.size() - 1);
    return table[i].first;
}

int DegreeDistribution::sample_degree(Stream& rng) const {
    if (!pareto_) return draw(pk_, cum_, rng);
    const double x = min_ * std::pow(uniform01(rng), -1.0 / (tau_ - 1.0));
    return x >= kMaxDegree ? kMaxDegree : static_cast<int>(x);
}

int DegreeDistribution::sample_offspring(bool is_root, Stream& rng) const {
    if (is_root) return sample_degree(rng);
    if (!pareto_) return draw(pk_, biased_cum_, rng) - 1;
    if (!std::isfinite(m1_)) throw std::domain_error("size-biased law needs a finite mean degree");
    // D = floor(X) with X continuous Pareto(tau - 1, min). Propose X* from the
    // size-biased continuous law Pareto(tau - 2, min) and accept with
    // probability floor(x)/x, which leaves D* = floor(X*) exactly size-biased.
    const double b = tau_ - 2.0;
    while (true) {
        const double x = min_ * std::pow(uniform01(rng), -1.0 / b);
        if (x >= kMaxDegree) return kMaxDegree - 1;
        if (uniform01(rng) * x <= std::floor(x)) return static_cast<int>(x) - 1;
    }
}

std::optional<int> DegreeDistribution::constant_offspring(bool is_root) const {
    if (pareto_ || pk_.size() != 1) return std::nullopt;
    return is_root ? pk_.front().first : pk_.front().first - 1;
}

std::string DegreeDistribution::describe() const {
    std::ostringstream os;
    if (pareto_) {
        os << "pareto-degree tau=" << tau_ << " min=" << min_;
        return os.str();
    }
    for (std::size_t i = 0; i < pk_.size(); ++i) os << (i ? "," : "") << pk_[i].first << "=" << pk_[i].second;
    return os.str();
}

double nu_of(const DegreeDistribution& dist) { return dist.nu(); }

double nu_of(const DegreeSequence& seq) {
    double m1 = 0.0, m2 = 0.0;
    for (int k : seq.d) {
        m1 += k;
        m2 += double(k) * k;
    }
    return (m2 - m1) / m1;
}

int sample_offspring(const DegreeDistribution& dist, bool is_root, Stream& rng) {
    return dist.sample_offspring(is_root, rng);
}

RegularityReport regularity_report(const DegreeSequence& seq, const DegreeDistribution& declared) {
    RegularityReport rep;
    const double n = static_cast<double>(seq.n());
    int dmin = std::numeric_limits<int>::max();
    for (int k : seq.d) {
        rep.mean += k;
        rep.second_moment += double(k) * k;
        dmin = std::min(dmin, k);
    }
    rep.mean /= n;
    rep.second_moment /= n;
    rep.declared_mean = declared.m1();
    rep.declared_second_moment = declared.m2();
    rep.mean_gap = std::abs(rep.mean - rep.declared_mean);
    rep.second_moment_finite = std::isfinite(declared.m2());
    rep.second_moment_gap = rep.second_moment_finite ? std::abs(rep.second_moment - rep.declared_second_moment) : kInf;
    rep.d2logd_finite = declared.d2logd_finite();
    rep.min_degree_ok = dmin >= 2;
    return rep;
}

DegreeSpec DegreeSpec::parse(std::string_view spec) {
    DegreeSpec out;
    out.text = std::string(spec);
    auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ConfigError("degree spec '" + out.text + "' has no parameters");
    const auto kind = spec.substr(0, colon);
    const auto rest = spec.substr(colon + 1);

    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
        auto pos = rest.find(':', start);
        parts.push_back(rest.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }

    try {
        if (kind == "file") {
            out.kind = Kind::File;
            out.path = std::string(rest);
            return out;
        }
        if (kind == "regular") {
            if (parts.empty() || parts.size() > 2) throw ConfigError("regular:<r>:<n> expected");
            double r = parse_value(parts[0], spec);
            if (!(r >= 1.0) || r != std::floor(r)) throw ConfigError("regular degree must be a positive integer");
            out.kind = Kind::Regular;
            out.law = DegreeDistribution::regular(static_cast<int>(r));
            if (parts.size() == 2) out.n = parse_count(parts[1], spec);
            return out;
        }
        if (kind == "iid") {
            if (parts.empty() || parts.size() > 2) throw ConfigError("iid:<pk-spec>:<n> expected");
            std::vector<std::pair<int, double>> pk;
            std::string_view list = parts[0];
            for (std::size_t start = 0;;) {
                auto pos = list.find(',', start);
                auto item = list.substr(start, pos - start);
                auto eq = item.find('=');
                if (eq == std::string_view::npos) throw ConfigError("pk entry '" + std::string(item) + "' lacks '='");
                double k = parse_value(item.substr(0, eq), spec);
                if (k != std::floor(k)) throw ConfigError("degree values must be integers");
                pk.emplace_back(static_cast<int>(k), parse_value(item.substr(eq + 1), spec));
                if (pos == std::string_view::npos) break;
                start = pos + 1;
            }
            out.kind = Kind::Iid;
            out.law = DegreeDistribution::finite(std::move(pk));
            if (parts.size() == 2) out.n = parse_count(parts[1], spec);
            return out;
        }
        if (kind == "pareto-degree") {
            if (parts.size() < 2 || parts.size() > 3) throw ConfigError("pareto-degree:<tau>:<min>:<n> expected");
            double tau = parse_value(parts[0], spec);
            double mn = parse_value(parts[1], spec);
            if (mn != std::floor(mn)) throw ConfigError("pareto-degree minimum must be an integer");
            out.kind = Kind::ParetoDegree;
            out.law = DegreeDistribution::pareto_tail(tau, static_cast<int>(mn));
            if (parts.size() == 3) out.n = parse_count(parts[2], spec);
            return out;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("degree spec '" + out.text + "': " + e.what());
    }
    throw ConfigError("unknown degree spec kind in '" + out.text + "'");
}

DegreeDistribution DegreeSpec::declared() const {
    if (law) return *law;
    return DegreeDistribution::empirical(normalize_sequence(read_degree_file(path)));
}

DegreeSequence DegreeSpec::realize(std::size_t count, Stream& rng) const {
    if (kind == Kind::File) return normalize_sequence(read_degree_file(path));
    std::vector<int> raw(count);
    for (auto& k : raw) k = law->sample_degree(rng);
    return normalize_sequence(raw);
}

std::vector<int> read_degree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open degree file '" + path + "'");
    std::vector<int> out;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        char* end = nullptr;
        long v = std::strtol(line.c_str() + first, &end, 10);
        if (end == line.c_str() + first) throw ConfigError("bad line in degree file '" + path + "': " + line);
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace newsrace
