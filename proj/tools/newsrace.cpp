// newsrace: command-line front end for the fake/correct news race.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "newsrace/cm_graph.hpp"
#include "newsrace/errors.hpp"
#include "newsrace/harness.hpp"
#include "newsrace/survival_theory.hpp"

using namespace newsrace;

namespace {

struct ModelArgs {
    std::string fake = "exp:1";
    std::string correct = "exp:1";
    std::string coupling = "independent";

    void attach(CLI::App* cmd) {
        cmd->add_option("--dist-f", fake, "fake-news traversal law (exp:r, det:c, unif:a:b, pareto:a:x)");
        cmd->add_option("--dist-r", correct, "correct-news traversal law");
        cmd->add_option("--coupling", coupling, "independent | comonotone | countermonotone");
    }

    JointTraversalModel model(bool feasible = true) const {
        try {
            JointTraversalModel m{Marginal::parse(fake), Marginal::parse(correct), parse_coupling(coupling)};
            if (feasible) require_feasible(m);
            return m;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
};

// Survival fractions per graph size go to stderr so stdout stays pure CSV.
void report_survival(const Records& rows, const std::vector<double>& eta, const std::vector<std::int64_t>& ks) {
    std::map<std::int64_t, Records> by_n;
    for (const auto& r : rows) by_n[r.integer("n")].push_back(r);
    for (const auto& [n, group] : by_n) {
        for (double e : eta)
            std::fprintf(stderr, "n=%lld eta=%s survival=%s\n", static_cast<long long>(n), format_number(e).c_str(),
                         format_number(survival_fraction_eta(group, e)).c_str());
        for (auto k : ks)
            std::fprintf(stderr, "n=%lld k=%lld survival=%s\n", static_cast<long long>(n), static_cast<long long>(k),
                         format_number(survival_fraction_count(group, k)).c_str());
    }
}

double parse_nu(const std::string& text) {
    if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("--nu expects a number or inf, got '" + text + "'");
    }
}

void kv(const char* key, double v) { std::printf("%s=%s\n", key, format_number(v).c_str()); }
void kv(const char* key, std::string_view v) { std::printf("%s=%.*s\n", key, int(v.size()), v.data()); }

void emit(const Records& rows, ExperimentKind kind, bool wall, const std::string& out) {
    const auto header = schema(kind, wall);
    if (out.empty() || out == "-")
        write_csv(std::cout, rows, header);
    else
        emit_csv(rows, header, out);
}

int theory_classify(const ModelArgs& args, const std::string& nu_text, double tol) {
    const auto model = args.model();
    const double nu = parse_nu(nu_text);
    if (!(nu > 1.0)) throw ConfigError("--nu must exceed 1");
    const auto weak = classify_weak(model, nu);
    const auto tree = classify_strong_tree(model);
    kv("distFake", model.fake.spec());
    kv("distCorrect", model.correct.spec());
    kv("coupling", to_string(model.coupling));
    kv("nu", nu);
    kv("meanFake", weak.mean_fake);
    kv("meanCorrect", weak.mean_correct);
    kv("rhoStatus", to_string(weak.rho.status));
    kv("h", weak.rho.h);
    kv("rho", weak.rho.rho);
    kv("sMax", weak.rho.s_max);
    kv("inverseNu", 1.0 / nu);
    kv("weak", weak.label());
    try {
        const auto strong = classify_strong_graph(model, nu, tol);
        kv("lambdaFake", strong.lambda_fake);
        kv("lambdaCorrect", strong.lambda_correct);
        kv("strongGraph", to_string(strong.outcome));
    } catch (const NoRoot& e) {
        kv("strongGraph", "NoRoot");
        kv("strongGraphReason", e.what());
    }
    kv("strongTree", to_string(tree.outcome));
    return 0;
}

int theory_stable_age(const ModelArgs& args, double nu, std::int64_t reps, int horizon, std::uint64_t seed,
                      const std::vector<double>& xs, const std::vector<double>& ts) {
    StableAgeOptions opts;
    opts.h_grid = xs;
    opts.horizons_t = ts;
    opts.reps = reps;
    opts.horizon = horizon;
    Stream rng = make_stream(substream_seed(seed, "stable-age", 0, 0));
    const auto rep = stable_age_report(args.model(), nu, opts, rng);
    kv("lambdaFake", rep.lambda_fake);
    kv("nuBarFake", rep.nu_bar_fake);
    kv("meanBarCorrect", rep.mean_bar_correct);
    for (const auto& [x, h] : rep.h_values) std::printf("H(%s)=%s\n", format_number(x).c_str(), format_number(h).c_str());
    kv("pStarHat", rep.p_star_hat);
    kv("pStarStderr", rep.p_star_stderr);
    kv("horizon", rep.horizon);
    kv("truncationBiasBound", rep.truncation_bias_bound);
    for (const auto& [t, p] : rep.p_star_t)
        std::printf("pStarT(%s)=%s\n", format_number(t).c_str(), format_number(p).c_str());
    kv("acceptanceRate", rep.acceptance_rate);
    kv("acceptanceStderr", rep.acceptance_stderr);
    kv("inverseNu", 1.0 / nu);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fake-news versus correct-news first-passage race on random graphs and trees"};
    app.require_subcommand(1);

    // theory
    auto* theory = app.add_subcommand("theory", "analytic criteria");
    theory->require_subcommand(1);
    ModelArgs classify_model;
    std::string nu_text = "2";
    double tol = 1e-9;
    auto* classify = theory->add_subcommand("classify", "weak and strong survival verdicts");
    classify_model.attach(classify);
    classify->add_option("--nu", nu_text, "mean forward degree (number or inf)");
    classify->add_option("--tol", tol, "relative tolerance for the Malthusian comparison");

    ModelArgs stable_model;
    double stable_nu = 2.0;
    std::int64_t stable_reps = 10000;
    int stable_horizon = 10000;
    std::uint64_t stable_seed = 1;
    std::vector<double> stable_x, stable_t;
    auto* stable = theory->add_subcommand("stable-age", "stable-age quantities and p*");
    stable_model.attach(stable);
    stable->add_option("--nu", stable_nu, "mean forward degree");
    stable->add_option("--reps", stable_reps, "tilted walks");
    stable->add_option("--horizon", stable_horizon, "steps per walk");
    stable->add_option("--seed", stable_seed, "master seed");
    stable->add_option("--x", stable_x, "points at which to evaluate H");
    stable->add_option("--t", stable_t, "horizons T for p*_T");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo on graphs or trees");
    simulate->require_subcommand(1);
    ExperimentConfig graph_cfg;
    ModelArgs graph_model;
    std::string dump_path;
    auto* graph = simulate->add_subcommand("graph", "race on configuration-model graphs");
    graph_model.attach(graph);
    graph->add_option("--degrees", graph_cfg.degrees, "regular:r[:n], iid:k=p,...[:n], pareto-degree:tau:min[:n], file:path")
        ->required();
    graph->add_option("--n", graph_cfg.n_grid, "graph sizes (overrides the size in --degrees)");
    graph->add_option("--delay", graph_cfg.delay, "head start of fake news");
    graph->add_option("--reps", graph_cfg.replications, "replications per size");
    graph->add_option("--seed", graph_cfg.master_seed, "master seed");
    graph->add_option("--workers", graph_cfg.workers, "worker threads (0: all cores)");
    graph->add_option("--out", graph_cfg.output, "CSV path (default stdout)");
    graph->add_flag("--wall-time", graph_cfg.record_wall_time, "add a wallSeconds column");
    graph->add_option("--dump-graph", dump_path, "also write the first realized graph here");

    ExperimentConfig tree_cfg;
    tree_cfg.kind = ExperimentKind::TreeSweep;
    ModelArgs tree_model;
    std::string tree_mode = "galton-watson";
    auto* tree = simulate->add_subcommand("tree", "race on branching-process trees");
    tree_model.attach(tree);
    tree->add_option("--offspring", tree_cfg.degrees, "offspring law, same grammar as --degrees")->required();
    tree->add_option("--gens", tree_cfg.generations, "generations K")->required();
    tree->add_option("--mode", tree_mode, "galton-watson | unimodular");
    tree->add_option("--delay", tree_cfg.delay, "head start of fake news");
    tree->add_option("--reps", tree_cfg.replications, "replications");
    tree->add_option("--seed", tree_cfg.master_seed, "master seed");
    tree->add_option("--cap", tree_cfg.population_cap, "population cap per generation");
    tree->add_option("--workers", tree_cfg.workers, "worker threads (0: all cores)");
    tree->add_option("--out", tree_cfg.output, "CSV path (default stdout)");

    ExperimentConfig tau_cfg;
    tau_cfg.kind = ExperimentKind::TauTail;
    ModelArgs tau_model;
    auto* tau = app.add_subcommand("tau-tail", "Monte Carlo of P(tau_d > k)");
    tau_model.attach(tau);
    tau->add_option("--kmax", tau_cfg.k_max, "largest k")->required();
    tau->add_option("--reps", tau_cfg.replications, "walks")->required();
    tau->add_option("--delay", tau_cfg.delay, "head start d");
    tau->add_option("--seed", tau_cfg.master_seed, "master seed");
    tau->add_option("--out", tau_cfg.output, "CSV path (default stdout)");

    std::string config_path, config_out;
    auto* sweep = app.add_subcommand("sweep", "run an experiment described by a JSON config");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--out", config_out, "CSV path (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (classify->parsed()) return theory_classify(classify_model, nu_text, tol);
        if (stable->parsed())
            return theory_stable_age(stable_model, stable_nu, stable_reps, stable_horizon, stable_seed, stable_x,
                                     stable_t);
        if (graph->parsed()) {
            graph_cfg.kind = ExperimentKind::GraphSweep;
            graph_cfg.dist_fake = graph_model.fake;
            graph_cfg.dist_correct = graph_model.correct;
            graph_cfg.coupling = graph_model.model().coupling;
            const auto rows = run_graph_sweep(graph_cfg);
            if (!dump_path.empty()) {
                // Rebuild the first replication's graph from its recorded seed.
                const auto spec = DegreeSpec::parse(graph_cfg.degrees);
                Stream rng = make_stream(static_cast<std::uint64_t>(rows.front().integer("seed")));
                const auto seq = spec.realize(static_cast<std::size_t>(rows.front().integer("n")), rng);
                auto g = build_cm(seq, rng);
                write_graph_dump(dump_path, assign_weights(std::move(g), graph_model.model(), rng));
            }
            emit(rows, graph_cfg.kind, graph_cfg.record_wall_time, graph_cfg.output);
            return 0;
        }
        if (tree->parsed()) {
            tree_cfg.dist_fake = tree_model.fake;
            tree_cfg.dist_correct = tree_model.correct;
            tree_cfg.coupling = tree_model.model(false).coupling;
            if (tree_mode == "galton-watson")
                tree_cfg.tree_mode = TreeMode::GaltonWatson;
            else if (tree_mode == "unimodular")
                tree_cfg.tree_mode = TreeMode::Unimodular;
            else
                throw ConfigError("--mode must be galton-watson or unimodular");
            emit(run_tree_sweep(tree_cfg), tree_cfg.kind, false, tree_cfg.output);
            return 0;
        }
        if (tau->parsed()) {
            tau_cfg.dist_fake = tau_model.fake;
            tau_cfg.dist_correct = tau_model.correct;
            tau_cfg.coupling = tau_model.model(false).coupling;
            emit(run_tau_tail(tau_cfg), tau_cfg.kind, false, tau_cfg.output);
            return 0;
        }
        if (sweep->parsed()) {
            auto cfg = load_config(config_path);
            if (!config_out.empty()) cfg.output = config_out;
            const auto rows = run_experiment(cfg);
            emit(rows, cfg.kind, cfg.record_wall_time, cfg.output);
            if (cfg.kind == ExperimentKind::GraphSweep || cfg.kind == ExperimentKind::Explosive)
                report_survival(rows, cfg.eta, cfg.k_thresholds);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
