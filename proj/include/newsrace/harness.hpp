#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "newsrace/degree.hpp"
#include "newsrace/traversal.hpp"
#include "newsrace/tree_process.hpp"

namespace newsrace {

enum class ExperimentKind { GraphSweep, TreeSweep, TauTail, TheoryTable, Explosive };

ExperimentKind parse_kind(std::string_view word);
std::string_view to_string(ExperimentKind k);

constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::GraphSweep;
    std::string degrees;  // degree spec (graph kinds) or offspring spec (tree kinds)
    std::string dist_fake;
    std::string dist_correct;
    Coupling coupling = Coupling::Independent;
    double delay = 0.0;
    std::vector<std::int64_t> n_grid;
    int generations = 10;      // tree-sweep
    int k_max = 10;            // tau-tail
    TreeMode tree_mode = TreeMode::GaltonWatson;
    std::int64_t population_cap = kDefaultPopulationCap;
    std::vector<double> nu_grid;  // theory-table
    std::int64_t replications = 1;
    std::vector<double> eta;         // fraction thresholds
    std::vector<std::int64_t> k_thresholds;  // count thresholds
    std::uint64_t master_seed = 0;
    std::string output;
    unsigned workers = 0;  // 0: hardware concurrency
    bool record_wall_time = false;

    JointTraversalModel model() const;

    /// Throws ConfigError when a spec does not parse or a field is out of range.
    void validate() const;
};

/// JSON object with a `schemaVersion` field; see the README for the keys.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

using Value = std::variant<std::int64_t, double, std::string>;

/// One CSV line: ordered (column, value) pairs.
struct RecordRow {
    std::vector<std::pair<std::string, Value>> fields;

    void add(std::string key, Value v) { fields.emplace_back(std::move(key), std::move(v)); }
    const Value& at(std::string_view key) const;
    double number(std::string_view key) const;
    std::int64_t integer(std::string_view key) const;
};

using Records = std::vector<RecordRow>;

/// Columns of each kind, in emission order.
std::vector<std::string> schema(ExperimentKind kind, bool wall_time = false);

/// Offsets from time_to_reach at which the epidemic curve is sampled.
const std::vector<double>& curve_offsets();
std::string curve_column(double offset);

/// Graph-sweep and explosive rows, sorted by (n, rep).
Records run_graph_sweep(const ExperimentConfig& cfg);

/// Rows (rep, k, z, zf, ratio, ...) sorted by (rep, k). Runs that go extinct
/// before the last generation are kept but marked `accepted = 0`; truncated
/// runs are marked `truncated = 1`.
Records run_tree_sweep(const ExperimentConfig& cfg);

Records run_tau_tail(const ExperimentConfig& cfg);
Records run_theory_table(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind.
Records run_experiment(const ExperimentConfig& cfg);

struct ExponentFit {
    double slope = 0.0;
    double std_error = 0.0;
    std::size_t points = 0;
};

/// Least-squares slope of log(median nFake) against log n. Throws
/// InsufficientData with fewer than 3 distinct n.
ExponentFit estimate_intermediate_exponent(const Records& records);

struct SizeSummary {
    std::int64_t n = 0;
    std::int64_t reps = 0;
    double mean_fraction = 0.0;
    double fraction_stderr = 0.0;
    double median_nfake = 0.0;
};

std::vector<SizeSummary> summarize_by_n(const Records& records);

/// Per-generation mean of zf and of zf/z over accepted, untruncated runs.
struct GenerationSummary {
    int k = 0;
    std::int64_t runs = 0;
    double mean_zf = 0.0;
    double zf_stderr = 0.0;
    double mean_ratio = 0.0;
    double ratio_stderr = 0.0;
};

struct TreeSweepSummary {
    std::vector<GenerationSummary> generations;
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;   // extinct before the last generation
    std::int64_t truncated = 0;  // population cap hit
};

TreeSweepSummary summarize_tree_sweep(const Records& records);

/// Fraction of rows with nFake >= eta * n, and with nFake >= k.
double survival_fraction_eta(const Records& records, double eta);
double survival_fraction_count(const Records& records, std::int64_t k);

/// Header + rows, 17 significant digits, `\n` line endings. Every row must
/// carry the columns of the header. Throws IoError on write failure.
void emit_csv(const Records& records, const std::vector<std::string>& header, const std::string& path);
void write_csv(std::ostream& out, const Records& records, const std::vector<std::string>& header);

/// Integers come back as int64, other numbers (including inf, nan) as double.
Records parse_csv(std::istream& in);
Records read_csv(const std::string& path);

std::string format_number(double x);

}  // namespace newsrace
