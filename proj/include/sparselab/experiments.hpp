#pragma once

#include "sparselab/corpus.hpp"
#include "sparselab/spectral.hpp"
#include "sparselab/theorem_suite.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sparselab {

inline constexpr const char* kToolName = "sparse-lab";
inline constexpr const char* kToolVersion = SPARSELAB_VERSION;

enum ExitCode : int { exit_ok = 0, exit_check_failure = 2, exit_nonconvergence = 3, exit_invalid_input = 4 };

/// Names accepted by `check`: "all" or one of these.
const std::vector<std::string>& check_names();

struct RunOptions {
    /// Empty or {"all"} selects every check.
    std::vector<std::string> checks;
    NormOptions norm;
    int threads = 1;
    int reduction_directions = 16;
    std::uint64_t direction_seed = 7;
    /// Deltas for the portion-preserving check.
    std::vector<double> portion_deltas{0.25, 0.5, 0.75};
};

struct InstanceResult {
    std::string digest;
    std::vector<CheckReport> reports;
    /// Nonzero when the instance aborted (exit_nonconvergence or exit_invalid_input).
    int error_code = 0;
    std::string error;
};

struct RunSummary {
    std::vector<InstanceResult> results;
    std::size_t checks_run = 0;
    std::size_t failures = 0;
    int exit_code = exit_ok;
};

/// Checks on one (S, W) instance; errors propagate.
std::vector<CheckReport> run_instance_checks(const SparseCollection& s, const MatrixWeight& w,
                                             const RunOptions& opts);
/// Checks on one (S, B) instance; errors propagate.
std::vector<CheckReport> run_symbol_checks(const SparseCollection& s, const SymbolFn& b, const RunOptions& opts);

/// Runs every instance of the corpus (in parallel when threads > 1); results
/// keep corpus order. exit_code: 4 if any instance had invalid input, else 3
/// on non-convergence, else 2 on any failed check, else 0.
RunSummary run_corpus(const Corpus& corpus, const RunOptions& opts);

/// Folds one instance outcome into a summary.
void record(RunSummary& summary, InstanceResult result);

/// Deterministic JSON report embedding tool version and config digest.
std::string summary_to_json(const RunSummary& summary, const std::string& config_digest);

/// Digest of the run configuration (corpus text, selection, tolerances).
std::string config_digest(const std::string& canonical_config);

enum class SweepKind { alpha, gap, sharpness };
SweepKind parse_sweep_kind(const std::string& name);

struct SweepConfig {
    SweepKind kind = SweepKind::alpha;
    int dim = 1;
    int depth = 8;
    int n = 1;
    SparseParams sparse;
    WeightParams weight;
    /// alpha: power exponents; sharpness: family parameters. Unused by gap.
    std::vector<double> values;
    SweepFamily family = SweepFamily::power_chain;
    int chain_length = -1;
};

/// Cotlar gap table of T_S on L^2_W as CSV (rows by gap |n - m|).
std::string cotlar_csv(const SparseCollection& s, const MatrixWeight& w, const NormOptions& norm,
                       const std::string& digest);

/// CSV with '#' header lines (tool, version, config digest, column notes).
std::string run_sweep(const SweepConfig& config, const NormOptions& norm, const std::string& digest);

struct BenchOptions {
    int min_depth = 8;
    int max_depth = 14;
    int n = 1;
    int repeats = 5;
    /// Each timing batch runs until at least this long.
    double min_batch_seconds = 0.02;
    bool dense = false;
    std::uint64_t dense_cap = 4096;
    /// Per-apply limit at max_depth.
    double max_seconds = 1.0;
    double slope_low = 0.8;
    double slope_high = 1.3;
};

struct BenchRow {
    int depth = 0;
    std::uint64_t cells = 0;
    double seconds = 0.0;
    /// Negative when the dense apply was not run.
    double dense_seconds = -1.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double slope = 0.0;
    bool slope_ok = false;
    bool time_ok = false;
};

/// Times the matrix-free T_S apply (d = 1, random S) for each depth and fits
/// log time against log N. Dense timing above dense_cap raises InvalidInput.
BenchReport run_bench(const BenchOptions& opts);
std::string bench_to_json(const BenchReport& report, const BenchOptions& opts, const std::string& digest);

} // namespace sparselab
