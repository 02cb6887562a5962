#include "newsrace/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "newsrace/cm_graph.hpp"
#include "newsrace/competition.hpp"
#include "newsrace/errors.hpp"
#include "newsrace/survival_theory.hpp"

namespace newsrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(i) for i in [0, count). Results must be written by index so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

Vertex uniform_vertex(std::size_t n, Stream& rng) {
    auto v = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return static_cast<Vertex>(std::min(v, n - 1));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <class T>
T json_get(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

std::string field_text(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
    const auto& s = std::get<std::string>(v);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

Value parse_field(const std::string& s, bool quoted) {
    if (quoted || s.empty()) return s;
    const char* b = s.c_str();
    char* end = nullptr;
    const bool int_like = s.find_first_not_of("+-0123456789") == std::string::npos;
    if (int_like && s != "-0") {
        errno = 0;
        const long long v = std::strtoll(b, &end, 10);
        if (*end == '\0' && errno == 0) return static_cast<std::int64_t>(v);
    }
    const double d = std::strtod(b, &end);
    if (*end == '\0') return d;
    return s;
}

std::vector<std::pair<std::string, bool>> split_csv_line(const std::string& line) {
    std::vector<std::pair<std::string, bool>> out;
    std::string cur;
    bool quoted = false, in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = quoted = true;
        } else if (c == ',') {
            out.emplace_back(std::move(cur), quoted);
            cur.clear();
            quoted = false;
        } else {
            cur += c;
        }
    }
    out.emplace_back(std::move(cur), quoted);
    return out;
}

void check_explosive(const ExperimentConfig& cfg, const DegreeSpec& spec) {
    const auto law = spec.declared();
    if (spec.kind != DegreeSpec::Kind::ParetoDegree || !(law.tau() > 2.0 && law.tau() < 3.0))
        throw ConfigError("explosive scenario needs pareto-degree with tau in (2, 3)");
    if (!Marginal::parse(cfg.dist_fake).is<Exponential>())
        throw ConfigError("explosive scenario needs exponential fake-news weights");
}

}  // namespace

ExperimentKind parse_kind(std::string_view word) {
    if (word == "graph-sweep") return ExperimentKind::GraphSweep;
    if (word == "tree-sweep") return ExperimentKind::TreeSweep;
    if (word == "tau-tail") return ExperimentKind::TauTail;
    if (word == "theory-table") return ExperimentKind::TheoryTable;
    if (word == "explosive") return ExperimentKind::Explosive;
    throw ConfigError("unknown experiment kind '" + std::string(word) + "'");
}

std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::GraphSweep:
            return "graph-sweep";
        case ExperimentKind::TreeSweep:
            return "tree-sweep";
        case ExperimentKind::TauTail:
            return "tau-tail";
        case ExperimentKind::TheoryTable:
            return "theory-table";
        case ExperimentKind::Explosive:
            return "explosive";
    }
    return "?";
}

JointTraversalModel ExperimentConfig::model() const {
    try {
        JointTraversalModel m{Marginal::parse(dist_fake), Marginal::parse(dist_correct), coupling};
        // the tree walk is well defined for any joint law; only graph and theory runs need P(L^F < L^R) > 0
        if (kind != ExperimentKind::TreeSweep && kind != ExperimentKind::TauTail) require_feasible(m);
        return m;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void ExperimentConfig::validate() const {
    if (replications < 1) throw ConfigError("replications must be >= 1");
    for (double e : eta)
        if (!(e > 0.0 && e < 1.0)) throw ConfigError("eta thresholds must lie in (0, 1)");
    for (auto k : k_thresholds)
        if (k < 1) throw ConfigError("count thresholds must be >= 1");
    if (!(delay >= 0.0) || !std::isfinite(delay)) throw ConfigError("delay must be finite and >= 0");
    (void)model();
    switch (kind) {
        case ExperimentKind::GraphSweep:
        case ExperimentKind::Explosive: {
            DegreeSpec spec;
            try {
                spec = DegreeSpec::parse(degrees);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            if (n_grid.empty() && !spec.n && spec.kind != DegreeSpec::Kind::File)
                throw ConfigError("graph sweep needs nGrid or a size in the degree spec");
            for (auto n : n_grid)
                if (n < 2) throw ConfigError("nGrid entries must be >= 2");
            if (kind == ExperimentKind::Explosive) check_explosive(*this, spec);
            break;
        }
        case ExperimentKind::TreeSweep:
            try {
                (void)DegreeSpec::parse(degrees).declared();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            if (generations < 0) throw ConfigError("generations must be >= 0");
            if (population_cap < 1) throw ConfigError("populationCap must be >= 1");
            break;
        case ExperimentKind::TauTail:
            if (k_max < 0) throw ConfigError("kMax must be >= 0");
            break;
        case ExperimentKind::TheoryTable:
            if (nu_grid.empty()) throw ConfigError("theory-table needs nuGrid");
            for (double nu : nu_grid)
                if (!(nu > 1.0)) throw ConfigError("nuGrid entries must exceed 1");
            break;
    }
}

ExperimentConfig parse_config(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("schemaVersion")) throw ConfigError("config lacks schemaVersion");
    if (json_get<int>(j, "schemaVersion") != kConfigSchemaVersion)
        throw ConfigError("unsupported schemaVersion (expected " + std::to_string(kConfigSchemaVersion) + ")");

    static const std::set<std::string> known{
        "schemaVersion", "kind",    "degrees",     "offspring", "distFake",       "distCorrect",
        "coupling",      "delay",   "nGrid",       "generations", "kMax",         "treeMode",
        "populationCap", "nuGrid",  "replications", "eta",      "kThresholds",    "masterSeed",
        "output",        "workers", "recordWallTime"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");

    ExperimentConfig cfg;
    cfg.kind = parse_kind(json_get<std::string>(j, "kind"));
    if (j.contains("degrees")) cfg.degrees = json_get<std::string>(j, "degrees");
    if (j.contains("offspring")) cfg.degrees = json_get<std::string>(j, "offspring");
    cfg.dist_fake = json_get<std::string>(j, "distFake");
    cfg.dist_correct = json_get<std::string>(j, "distCorrect");
    if (j.contains("coupling")) {
        try {
            cfg.coupling = parse_coupling(json_get<std::string>(j, "coupling"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (j.contains("delay")) cfg.delay = json_get<double>(j, "delay");
    if (j.contains("nGrid")) cfg.n_grid = json_get<std::vector<std::int64_t>>(j, "nGrid");
    if (j.contains("generations")) cfg.generations = json_get<int>(j, "generations");
    if (j.contains("kMax")) cfg.k_max = json_get<int>(j, "kMax");
    if (j.contains("treeMode")) {
        const auto mode = json_get<std::string>(j, "treeMode");
        if (mode == "galton-watson")
            cfg.tree_mode = TreeMode::GaltonWatson;
        else if (mode == "unimodular")
            cfg.tree_mode = TreeMode::Unimodular;
        else
            throw ConfigError("treeMode must be galton-watson or unimodular");
    }
    if (j.contains("populationCap")) cfg.population_cap = json_get<std::int64_t>(j, "populationCap");
    if (j.contains("nuGrid")) cfg.nu_grid = json_get<std::vector<double>>(j, "nuGrid");
    if (j.contains("replications")) cfg.replications = json_get<std::int64_t>(j, "replications");
    if (j.contains("eta")) cfg.eta = json_get<std::vector<double>>(j, "eta");
    if (j.contains("kThresholds")) cfg.k_thresholds = json_get<std::vector<std::int64_t>>(j, "kThresholds");
    if (j.contains("masterSeed")) cfg.master_seed = json_get<std::uint64_t>(j, "masterSeed");
    if (j.contains("output")) cfg.output = json_get<std::string>(j, "output");
    if (j.contains("workers")) cfg.workers = json_get<unsigned>(j, "workers");
    if (j.contains("recordWallTime")) cfg.record_wall_time = json_get<bool>(j, "recordWallTime");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

const Value& RecordRow::at(std::string_view key) const {
    for (const auto& [k, v] : fields)
        if (k == key) return v;
    throw std::out_of_range("record has no column '" + std::string(key) + "'");
}

double RecordRow::number(std::string_view key) const {
    const auto& v = at(key);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw std::invalid_argument("column '" + std::string(key) + "' is not numeric");
}

std::int64_t RecordRow::integer(std::string_view key) const {
    const auto& v = at(key);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v)) return static_cast<std::int64_t>(*d);
    throw std::invalid_argument("column '" + std::string(key) + "' is not numeric");
}

const std::vector<double>& curve_offsets() {
    static const std::vector<double> offsets{-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0};
    return offsets;
}

std::string curve_column(double offset) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "curve%c%g", offset < 0 ? 'M' : 'P', std::abs(offset));
    return buf;
}

std::vector<std::string> schema(ExperimentKind kind, bool wall_time) {
    switch (kind) {
        case ExperimentKind::GraphSweep:
        case ExperimentKind::Explosive: {
            std::vector<std::string> cols{"n",      "rep",           "seed",      "parityFix", "source", "nFake",
                                          "fracFake", "componentSize", "aN",        "timeToReach"};
            for (double off : curve_offsets()) cols.push_back(curve_column(off));
            if (wall_time) cols.push_back("wallSeconds");
            return cols;
        }
        case ExperimentKind::TreeSweep:
            return {"rep", "seed", "k", "z", "zf", "ratio", "accepted", "truncated"};
        case ExperimentKind::TauTail:
            return {"k", "delay", "pHat", "stderr", "reps"};
        case ExperimentKind::TheoryTable:
            return {"nu",       "distFake",      "distCorrect", "coupling",    "meanFake",   "meanCorrect",
                    "rhoStatus", "h",            "rho",         "sMax",        "weak",       "lambdaFake",
                    "lambdaCorrect", "strongGraph", "strongTree"};
    }
    return {};
}

Records run_graph_sweep(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::GraphSweep && cfg.kind != ExperimentKind::Explosive)
        throw ConfigError("run_graph_sweep needs kind graph-sweep or explosive");
    cfg.validate();
    const auto spec = DegreeSpec::parse(cfg.degrees);
    const auto model = cfg.model();
    const std::string kind{to_string(cfg.kind)};

    std::vector<std::int64_t> sizes = cfg.n_grid;
    if (spec.kind == DegreeSpec::Kind::File)
        sizes = {static_cast<std::int64_t>(read_degree_file(spec.path).size())};
    else if (sizes.empty())
        sizes = {static_cast<std::int64_t>(*spec.n)};
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

    std::vector<std::pair<std::int64_t, std::int64_t>> tasks;
    for (auto n : sizes)
        for (std::int64_t r = 0; r < cfg.replications; ++r) tasks.emplace_back(n, r);

    Records rows(tasks.size());
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
        const auto [n, rep] = tasks[i];
        const auto started = std::chrono::steady_clock::now();
        const std::uint64_t seed = substream_seed(cfg.master_seed, kind, static_cast<std::uint64_t>(n),
                                                  static_cast<std::uint64_t>(rep));
        Stream rng = make_stream(seed);
        const auto seq = spec.realize(static_cast<std::size_t>(n), rng);
        auto graph = build_cm(seq, rng);
        const auto comps = largest_component(graph);
        const auto wg = assign_weights(std::move(graph), model, rng);
        Vertex source = uniform_vertex(seq.n(), rng);
        while (comps.membership[source] != comps.largest) source = uniform_vertex(seq.n(), rng);

        const auto res = run_competition(wg, source, cfg.delay);
        const auto a_n = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(seq.n()))));
        const double t_a = time_to_reach(res, a_n);
        std::vector<double> grid;
        for (double off : curve_offsets()) grid.push_back(t_a + off);
        const auto curve = epidemic_curve(res, grid);

        RecordRow row;
        row.add("n", static_cast<std::int64_t>(seq.n()));
        row.add("rep", rep);
        row.add("seed", static_cast<std::int64_t>(seed));
        row.add("parityFix", std::int64_t{seq.fix_applied});
        row.add("source", std::int64_t{source});
        row.add("nFake", res.n_fake);
        row.add("fracFake", static_cast<double>(res.n_fake) / static_cast<double>(seq.n()));
        row.add("componentSize", comps.sizes[comps.largest]);
        row.add("aN", a_n);
        row.add("timeToReach", t_a);
        for (std::size_t c = 0; c < curve.size(); ++c) row.add(curve_column(curve_offsets()[c]), curve[c]);
        if (cfg.record_wall_time)
            row.add("wallSeconds",
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
        rows[i] = std::move(row);
    });
    return rows;
}

Records run_tree_sweep(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::TreeSweep) throw ConfigError("run_tree_sweep needs kind tree-sweep");
    cfg.validate();
    const auto offspring = DegreeSpec::parse(cfg.degrees).declared();
    const auto model = cfg.model();

    std::vector<Records> per_rep(static_cast<std::size_t>(cfg.replications));
    parallel_for(per_rep.size(), cfg.workers, [&](std::size_t rep) {
        const std::uint64_t seed = substream_seed(cfg.master_seed, "tree-sweep",
                                                  static_cast<std::uint64_t>(cfg.generations), rep);
        Stream rng = make_stream(seed);
        const auto res =
            simulate_tree(offspring, cfg.tree_mode, model, cfg.generations, cfg.delay, rng, cfg.population_cap);
        const bool accepted = !res.truncated && res.z.back() > 0;
        for (std::size_t k = 0; k < res.z.size(); ++k) {
            RecordRow row;
            row.add("rep", static_cast<std::int64_t>(rep));
            row.add("seed", static_cast<std::int64_t>(seed));
            row.add("k", static_cast<std::int64_t>(k));
            row.add("z", res.z[k]);
            row.add("zf", res.zf[k]);
            row.add("ratio", res.z[k] > 0 ? static_cast<double>(res.zf[k]) / static_cast<double>(res.z[k]) : kNaN);
            row.add("accepted", std::int64_t{accepted});
            row.add("truncated", std::int64_t{res.truncated});
            per_rep[rep].push_back(std::move(row));
        }
    });
    Records rows;
    for (auto& r : per_rep)
        for (auto& row : r) rows.push_back(std::move(row));
    return rows;
}

Records run_tau_tail(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::TauTail) throw ConfigError("run_tau_tail needs kind tau-tail");
    cfg.validate();
    Stream rng = make_stream(substream_seed(cfg.master_seed, "tau-tail", static_cast<std::uint64_t>(cfg.k_max), 0));
    Records rows;
    for (const auto& e : estimate_tau_tail(cfg.model(), cfg.delay, cfg.k_max, cfg.replications, rng)) {
        RecordRow row;
        row.add("k", std::int64_t{e.k});
        row.add("delay", e.delay);
        row.add("pHat", e.p_hat);
        row.add("stderr", e.std_error);
        row.add("reps", e.replications);
        rows.push_back(std::move(row));
    }
    return rows;
}

Records run_theory_table(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::TheoryTable) throw ConfigError("run_theory_table needs kind theory-table");
    cfg.validate();
    const auto model = cfg.model();
    const auto tree = classify_strong_tree(model);
    Records rows;
    for (double nu : cfg.nu_grid) {
        const auto weak = classify_weak(model, nu);
        RecordRow row;
        row.add("nu", nu);
        row.add("distFake", model.fake.spec());
        row.add("distCorrect", model.correct.spec());
        row.add("coupling", std::string(to_string(model.coupling)));
        row.add("meanFake", weak.mean_fake);
        row.add("meanCorrect", weak.mean_correct);
        row.add("rhoStatus", std::string(to_string(weak.rho.status)));
        row.add("h", weak.rho.h);
        row.add("rho", weak.rho.rho);
        row.add("sMax", weak.rho.s_max);
        row.add("weak", weak.label());
        try {
            const auto strong = classify_strong_graph(model, nu);
            row.add("lambdaFake", strong.lambda_fake);
            row.add("lambdaCorrect", strong.lambda_correct);
            row.add("strongGraph", std::string(to_string(strong.outcome)));
        } catch (const NoRoot&) {
            row.add("lambdaFake", kNaN);
            row.add("lambdaCorrect", kNaN);
            row.add("strongGraph", std::string("NoRoot"));
        }
        row.add("strongTree", std::string(to_string(tree.outcome)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Records run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::GraphSweep:
        case ExperimentKind::Explosive:
            return run_graph_sweep(cfg);
        case ExperimentKind::TreeSweep:
            return run_tree_sweep(cfg);
        case ExperimentKind::TauTail:
            return run_tau_tail(cfg);
        case ExperimentKind::TheoryTable:
            return run_theory_table(cfg);
    }
    return {};
}

std::vector<SizeSummary> summarize_by_n(const Records& records) {
    std::map<std::int64_t, std::vector<const RecordRow*>> groups;
    for (const auto& r : records) groups[r.integer("n")].push_back(&r);
    std::vector<SizeSummary> out;
    for (const auto& [n, rows] : groups) {
        SizeSummary s;
        s.n = n;
        s.reps = static_cast<std::int64_t>(rows.size());
        std::vector<double> counts;
        double sum = 0.0, sum2 = 0.0;
        for (const auto* r : rows) {
            const double f = r->number("nFake") / static_cast<double>(n);
            sum += f;
            sum2 += f * f;
            counts.push_back(r->number("nFake"));
        }
        const double k = static_cast<double>(rows.size());
        s.mean_fraction = sum / k;
        const double var = k > 1 ? std::max(0.0, (sum2 - k * s.mean_fraction * s.mean_fraction) / (k - 1)) : 0.0;
        s.fraction_stderr = std::sqrt(var / k);
        s.median_nfake = median(counts);
        out.push_back(s);
    }
    return out;
}

ExponentFit estimate_intermediate_exponent(const Records& records) {
    const auto groups = summarize_by_n(records);
    if (groups.size() < 3) throw InsufficientData("exponent fit needs at least 3 distinct n");
    std::vector<double> x, y;
    for (const auto& g : groups) {
        if (!(g.median_nfake > 0.0)) throw InsufficientData("median nFake must be positive");
        x.push_back(std::log(static_cast<double>(g.n)));
        y.push_back(std::log(g.median_nfake));
    }
    const double k = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / k;
        my += y[i] / k;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    ExponentFit fit;
    fit.points = x.size();
    fit.slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (my + fit.slope * (x[i] - mx));
        ssr += e * e;
    }
    fit.std_error = std::sqrt(ssr / (k - 2.0) / sxx);
    return fit;
}

TreeSweepSummary summarize_tree_sweep(const Records& records) {
    TreeSweepSummary s;
    std::set<std::int64_t> accepted, rejected, truncated;
    struct Acc {
        std::int64_t runs = 0;
        double zf = 0, zf2 = 0, ratio = 0, ratio2 = 0;
    };
    std::map<int, Acc> acc;
    for (const auto& r : records) {
        const auto rep = r.integer("rep");
        if (r.integer("truncated")) {
            truncated.insert(rep);
            continue;
        }
        if (!r.integer("accepted")) {
            rejected.insert(rep);
            continue;
        }
        accepted.insert(rep);
        auto& a = acc[static_cast<int>(r.integer("k"))];
        const double zf = r.number("zf"), ratio = r.number("ratio");
        ++a.runs;
        a.zf += zf;
        a.zf2 += zf * zf;
        a.ratio += ratio;
        a.ratio2 += ratio * ratio;
    }
    auto se = [](double sum, double sum2, double k) {
        if (k < 2) return 0.0;
        const double m = sum / k;
        return std::sqrt(std::max(0.0, (sum2 - k * m * m) / (k - 1)) / k);
    };
    for (const auto& [k, a] : acc) {
        const double runs = static_cast<double>(a.runs);
        s.generations.push_back({k, a.runs, a.zf / runs, se(a.zf, a.zf2, runs), a.ratio / runs,
                                 se(a.ratio, a.ratio2, runs)});
    }
    s.accepted = static_cast<std::int64_t>(accepted.size());
    s.rejected = static_cast<std::int64_t>(rejected.size());
    s.truncated = static_cast<std::int64_t>(truncated.size());
    return s;
}

double survival_fraction_eta(const Records& records, double eta) {
    if (records.empty()) return kNaN;
    std::int64_t hits = 0;
    for (const auto& r : records)
        if (r.number("nFake") >= eta * r.number("n")) ++hits;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double survival_fraction_count(const Records& records, std::int64_t k) {
    if (records.empty()) return kNaN;
    std::int64_t hits = 0;
    for (const auto& r : records)
        if (r.integer("nFake") >= k) ++hits;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& out, const Records& records, const std::vector<std::string>& header) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& row : records) {
        if (row.fields.size() != header.size())
            throw std::invalid_argument("record does not match the CSV header");
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (row.fields[c].first != header[c])
                throw std::invalid_argument("record column '" + row.fields[c].first + "' does not match header");
            out << (c ? "," : "") << field_text(row.fields[c].second);
        }
        out << '\n';
    }
}

void emit_csv(const Records& records, const std::vector<std::string>& header, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_csv(out, records, header);
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

Records parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return {};
    std::vector<std::string> header;
    for (auto& [name, _] : split_csv_line(line)) header.push_back(name);
    Records rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw IoError("CSV row has " + std::to_string(cells.size()) +
                                                         " fields, header has " + std::to_string(header.size()));
        RecordRow row;
        for (std::size_t c = 0; c < cells.size(); ++c) row.add(header[c], parse_field(cells[c].first, cells[c].second));
        rows.push_back(std::move(row));
    }
    return rows;
}

Records read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_csv(in);
}

}  // namespace newsrace
