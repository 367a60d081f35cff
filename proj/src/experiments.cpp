#include "sparselab/experiments.hpp"

#include "sparselab/decomposition.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"
#include "sparselab/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace sparselab {

using nlohmann::ordered_json;

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{
        "verify_sparse", "decay", "lower_bound", "upper_bound", "scalar_lower_bound", "reduction",
        "cotlar_stein", "mixed_bound", "portion_preserving", "reverse_holder", "small_portion_ainf", "ainf_vs_a2",
        "a2_identity", "block_conjugation", "commutator_chain", "block_inverse"};
    return names;
}

namespace {

bool selected(const RunOptions& opts, const std::string& name) {
    if (opts.checks.empty()) return true;
    for (const auto& c : opts.checks)
        if (c == "all" || c == name) return true;
    return false;
}

void validate_selection(const RunOptions& opts) {
    const auto& names = check_names();
    for (const auto& c : opts.checks)
        if (c != "all" && std::find(names.begin(), names.end(), c) == names.end())
            throw InvalidInput("unknown check '" + c + "'");
}

std::string num(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CheckReport sparse_report(const SparseCollection& s) {
    const auto strong = verify_sparse(s);
    const auto weak = verify_weak_sparse(s, 0.5);
    auto r = make_report("verify_sparse", strong.worst_ratio.to_double(), 0.5, 0.0);
    r.pass = strong.ok && weak.ok && weak.disjoint;
    r.extras = {{"weak_min_ratio", weak.min_ratio.to_double()}};
    if (strong.offender) r.notes = "offending cube " + to_string(*strong.offender);
    else if (weak.offender) r.notes = "weak sparseness fails at " + to_string(*weak.offender);
    return r;
}

CheckReport decay_report(const SparseCollection& s) {
    const auto d = verify_decay(s);
    auto r = make_report("decay", d.worst_scaled_ratio.to_double(), 1.0, 0.0);
    r.pass = d.ok;
    r.extras = {{"worst_n", static_cast<double>(d.worst_n)}};
    if (d.worst_cube) r.notes = "worst at " + to_string(*d.worst_cube) + ", exact " + d.worst_scaled_ratio.to_string();
    return r;
}

} // namespace

std::vector<CheckReport> run_instance_checks(const SparseCollection& s, const MatrixWeight& w,
                                             const RunOptions& opts) {
    validate_selection(opts);
    std::vector<CheckReport> out;
    auto want = [&](const char* name) { return selected(opts, name); };

    if (want("verify_sparse")) out.push_back(sparse_report(s));
    if (want("decay")) out.push_back(decay_report(s));

    const bool need_norm = want("lower_bound") || want("upper_bound") || want("scalar_lower_bound") ||
                           want("cotlar_stein") || (w.n() == 1 && want("mixed_bound"));
    NormReport norm;
    if (need_norm) norm = weighted_norm(sparse_operator(s, w.n()), w, opts.norm);

    if (want("lower_bound")) out.push_back(check_lower_bound(s, w, norm));
    if (want("upper_bound")) out.push_back(check_upper_bound(s, w, norm));
    if (want("reduction"))
        out.push_back(check_reduction(w, s, opts.reduction_directions, opts.direction_seed));

    const bool need_summary = want("cotlar_stein") || (w.n() == 1 && want("mixed_bound"));
    WeightSummary summary;
    if (need_summary) summary = summarize_weight(w, s, opts.reduction_directions, opts.direction_seed);
    if (want("cotlar_stein")) {
        const auto dec = decompose(s);
        out.push_back(check_cotlar(s, dec, w, summary, norm, opts.norm));
    }

    if (w.n() == 1) {
        if (want("scalar_lower_bound")) out.push_back(check_scalar_lower_bound(s, w, norm));
        if (want("mixed_bound")) out.push_back(check_mixed_bound(s, w, summary, norm));
        if (want("portion_preserving")) out.push_back(check_portion_preserving_worst(w, s, opts.portion_deltas));
        if (want("reverse_holder")) out.push_back(check_reverse_holder(w));
        if (want("small_portion_ainf")) out.push_back(check_small_portion_ainf(w));
        if (want("ainf_vs_a2")) out.push_back(check_ainf_vs_a2(w));
    }
    return out;
}

std::vector<CheckReport> run_symbol_checks(const SparseCollection& s, const SymbolFn& b, const RunOptions& opts) {
    validate_selection(opts);
    std::vector<CheckReport> out;
    if (selected(opts, "verify_sparse")) out.push_back(sparse_report(s));
    if (selected(opts, "block_inverse")) {
        const double res = block_inverse_residual(b);
        out.push_back(make_report("block_inverse", res, 1e-10, 0.0));
    }
    if (selected(opts, "a2_identity")) out.push_back(verify_a2_identity(b, s));
    if (selected(opts, "block_conjugation")) out.push_back(verify_block_conjugation(s, b, 1e-10, opts.norm));
    if (selected(opts, "commutator_chain")) out.push_back(two_sided_commutator_bounds(s, b, opts.norm));
    return out;
}

void record(RunSummary& summary, InstanceResult result) {
    for (const auto& r : result.reports) {
        ++summary.checks_run;
        if (!r.pass) ++summary.failures;
    }
    if (result.error_code == exit_invalid_input) summary.exit_code = exit_invalid_input;
    else if (result.error_code == exit_nonconvergence && summary.exit_code != exit_invalid_input)
        summary.exit_code = exit_nonconvergence;
    else if (summary.failures > 0 && summary.exit_code == exit_ok)
        summary.exit_code = exit_check_failure;
    summary.results.push_back(std::move(result));
}

namespace {

template <class Fn>
InstanceResult guarded(std::string digest, Fn&& fn) {
    InstanceResult res;
    res.digest = std::move(digest);
    try {
        res.reports = fn();
        for (auto& r : res.reports) r.digest = res.digest;
    } catch (const NumericalError& e) {
        res.error_code = exit_nonconvergence;
        res.error = e.what();
    } catch (const InvalidInput& e) {
        res.error_code = exit_invalid_input;
        res.error = e.what();
    }
    return res;
}

} // namespace

RunSummary run_corpus(const Corpus& corpus, const RunOptions& opts) {
    validate_selection(opts);
    const std::size_t total = corpus.instances.size() + corpus.symbols.size();
    std::vector<InstanceResult> results(total);

    auto job = [&](std::size_t i) {
        if (i < corpus.instances.size()) {
            const auto& spec = corpus.instances[i];
            results[i] = guarded(describe(spec), [&] {
                const auto s = build_sparse(spec);
                const auto w = build_weight(spec);
                return run_instance_checks(s, w, opts);
            });
        } else {
            const auto& spec = corpus.symbols[i - corpus.instances.size()];
            results[i] = guarded(describe(spec), [&] {
                const auto s = build_sparse(spec);
                const auto b = build_symbol(spec);
                return run_symbol_checks(s, b, opts);
            });
        }
    };

    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(std::max<std::size_t>(total, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < total; ++i) job(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < total; i = next++) job(i);
            });
    }

    RunSummary summary;
    for (auto& r : results) record(summary, std::move(r));
    return summary;
}

std::string config_digest(const std::string& canonical_config) { return fnv1a_hex(canonical_config); }

namespace {

ordered_json report_json(const CheckReport& r) {
    ordered_json j;
    j["name"] = r.name;
    j["pass"] = r.pass;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["margin"] = r.margin;
    j["residual"] = r.residual;
    if (!r.notes.empty()) j["notes"] = r.notes;
    if (!r.extras.empty()) {
        ordered_json ex = ordered_json::object();
        for (const auto& [k, v] : r.extras) ex[k] = v;
        j["extras"] = ex;
    }
    return j;
}

} // namespace

std::string summary_to_json(const RunSummary& summary, const std::string& config_digest) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["config_digest"] = config_digest;
    ordered_json results = ordered_json::array();
    for (const auto& inst : summary.results) {
        ordered_json e;
        e["digest"] = inst.digest;
        if (inst.error_code != 0) {
            e["error_code"] = inst.error_code;
            e["error"] = inst.error;
        }
        ordered_json checks = ordered_json::array();
        for (const auto& r : inst.reports) checks.push_back(report_json(r));
        e["checks"] = std::move(checks);
        results.push_back(std::move(e));
    }
    j["results"] = std::move(results);
    ordered_json failures = ordered_json::array();
    for (const auto& inst : summary.results) {
        if (inst.error_code != 0) failures.push_back({{"digest", inst.digest}, {"error", inst.error}});
        for (const auto& r : inst.reports)
            if (!r.pass) failures.push_back({{"digest", inst.digest}, {"check", r.name}});
    }
    j["summary"] = {{"instances", summary.results.size()},
                    {"checks", summary.checks_run},
                    {"failures", summary.failures},
                    {"failed", std::move(failures)}};
    j["exit_code"] = summary.exit_code;
    return j.dump(2) + "\n";
}

SweepKind parse_sweep_kind(const std::string& name) {
    if (name == "alpha") return SweepKind::alpha;
    if (name == "gap") return SweepKind::gap;
    if (name == "sharpness") return SweepKind::sharpness;
    throw InvalidInput("unknown sweep kind '" + name + "'");
}

namespace {

std::string csv_header(const std::string& digest, const std::string& columns_doc) {
    std::string h = "# ";
    h += kToolName;
    h += " ";
    h += kToolVersion;
    h += "\n# config " + digest + "\n" + columns_doc;
    return h;
}

std::string alpha_sweep(const SweepConfig& c, const NormOptions& norm, const std::string& digest) {
    std::ostringstream out;
    out << csv_header(digest,
                      "# alpha: power exponent; a2_sparse, a2_full: A_2 over S and over all cubes;\n"
                      "# ainf, ainf_dual: A_inf of w and w^-1 (lower estimates when n > 1);\n"
                      "# norm, residual: ||T_S|| on L^2_W and its Lanczos residual;\n"
                      "# lower = a2_sparse^(1/4)/sqrt2, upper = 64 a2_sparse^(3/2), mixed = c_d (a2 ainf ainf_dual)^(1/2);\n"
                      "# margins are bound minus norm (lower: norm minus bound)\n");
    out << "alpha,a2_sparse,a2_full,ainf,ainf_dual,norm,residual,lower,upper,mixed,lower_margin,upper_margin,"
           "mixed_margin\n";
    GridSpec grid(c.dim, c.depth, static_cast<std::uint64_t>(c.n));
    const auto s = gen_sparse(grid, c.sparse);
    for (double alpha : c.values) {
        WeightParams wp = c.weight;
        wp.kind = WeightKind::power;
        wp.alpha = alpha;
        const auto w = gen_weight(grid, c.n, wp);
        const auto sum = summarize_weight(w, s);
        const auto nr = weighted_norm(sparse_operator(s, c.n), w, norm);
        const double lower = std::pow(sum.a2_sparse, 0.25) / std::numbers::sqrt2;
        const double upper = 64.0 * std::pow(sum.a2_sparse, 1.5);
        const double mixed =
            mixed_bound_constant(c.dim) * std::sqrt(sum.a2_full * sum.ainf * sum.ainf_dual);
        out << num(alpha) << ',' << num(sum.a2_sparse) << ',' << num(sum.a2_full) << ',' << num(sum.ainf) << ','
            << num(sum.ainf_dual) << ',' << num(nr.norm) << ',' << num(nr.residual) << ',' << num(lower) << ','
            << num(upper) << ',' << num(mixed) << ',' << num(nr.norm - lower) << ',' << num(upper - nr.norm) << ','
            << num(mixed - nr.norm) << '\n';
    }
    return out.str();
}

std::string sharpness_csv(const SweepConfig& c, const NormOptions& norm, const std::string& digest);

} // namespace

std::string cotlar_csv(const SparseCollection& s, const MatrixWeight& w, const NormOptions& norm,
                       const std::string& digest) {
    if (s.grid() != w.grid()) throw InvalidInput("cotlar: sparse collection and weight live on different grids");
    const auto dec = decompose(s);
    const auto sum = summarize_weight(w, s);
    const auto table = cotlar_table(s, dec, w, sum, norm);
    if (table.rows.empty()) throw InvalidInput("gap sweep: the collection has no stopping families");

    std::ostringstream out;
    out << csv_header(digest,
                      "# gap: |n - m|; norm_star_first, norm_star_second: max ||T_n^* T_m||, ||T_n T_m^*|| at that gap;\n"
                      "# bound_case1 = (1 - 1/(4 a2_sparse))^(gap/2) a2_sparse; alpha, beta: case 2 bounds;\n"
                      "# margin_case1 = bound_case1 - max(norm_star_first, norm_star_second)\n");
    out << "# a2_sparse " << num(sum.a2_sparse) << " max_residual " << num(table.max_residual) << "\n";
    out << "gap,norm_star_first,norm_star_second,bound_case1,alpha,beta,margin_case1\n";
    for (const auto& r : table.rows)
        out << r.gap << ',' << num(r.norm_star_first) << ',' << num(r.norm_star_second) << ','
            << num(r.bound_case1) << ',' << num(r.alpha) << ',' << num(r.beta) << ','
            << num(r.bound_case1 - std::max(r.norm_star_first, r.norm_star_second)) << '\n';
    return out.str();
}

namespace {

std::string gap_sweep(const SweepConfig& c, const NormOptions& norm, const std::string& digest) {
    GridSpec grid(c.dim, c.depth, static_cast<std::uint64_t>(c.n));
    const auto s = gen_sparse(grid, c.sparse);
    const auto w = gen_weight(grid, c.n, c.weight);
    return cotlar_csv(s, w, norm, digest);
}

std::string sharpness_csv(const SweepConfig& c, const NormOptions& norm, const std::string& digest) {
    const auto fit = sharpness_sweep(c.family, c.depth, c.values, norm, c.chain_length);
    std::ostringstream out;
    out << csv_header(digest,
                      "# family " + to_string(c.family) +
                          "; parameter: family parameter; a2_sparse: [W]_{A_2^S}; norm: ||T_S|| on L^2_W;\n"
                          "# log_a2, log_norm: natural logs; the fitted exponent follows the rows\n");
    out << "parameter,a2_sparse,norm,residual,log_a2,log_norm\n";
    for (const auto& p : fit.points)
        out << num(p.parameter) << ',' << num(p.a2_sparse) << ',' << num(p.norm) << ',' << num(p.residual) << ','
            << num(std::log(p.a2_sparse)) << ',' << num(std::log(p.norm)) << '\n';
    out << "# exponent " << num(fit.exponent) << " degenerate " << (fit.degenerate ? 1 : 0) << " in_corridor "
        << (fit.in_corridor ? 1 : 0) << '\n';
    return out.str();
}

} // namespace

std::string run_sweep(const SweepConfig& config, const NormOptions& norm, const std::string& digest) {
    if (config.kind != SweepKind::gap && config.values.empty())
        throw InvalidInput("sweep: empty parameter range");
    for (double v : config.values)
        if (!std::isfinite(v)) throw InvalidInput("sweep: non-finite parameter value");
    switch (config.kind) {
    case SweepKind::alpha: return alpha_sweep(config, norm, digest);
    case SweepKind::gap: return gap_sweep(config, norm, digest);
    case SweepKind::sharpness: return sharpness_csv(config, norm, digest);
    }
    throw InvalidInput("sweep: unknown kind");
}

namespace {

using Clock = std::chrono::steady_clock;

// Seconds per call: batches grow until they exceed min_batch, min over repeats.
template <class Fn>
double time_per_call(Fn&& fn, int repeats, double min_batch) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        long calls = 1;
        for (;;) {
            const auto t0 = Clock::now();
            for (long i = 0; i < calls; ++i) fn();
            const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
            if (dt >= min_batch || calls > (1L << 30)) {
                best = std::min(best, dt / static_cast<double>(calls));
                break;
            }
            calls *= 2;
        }
    }
    return best;
}

} // namespace

BenchReport run_bench(const BenchOptions& opts) {
    if (opts.min_depth < 1 || opts.max_depth < opts.min_depth)
        throw InvalidInput("bench: depth range must satisfy 1 <= min_depth <= max_depth");
    if (opts.max_depth - opts.min_depth < 2) throw InvalidInput("bench: need at least 3 depths for a slope fit");
    if (opts.repeats < 1) throw InvalidInput("bench: repeats must be positive");
    if (opts.n < 1) throw InvalidInput("bench: n must be positive");
    if (opts.dense) {
        const std::uint64_t largest = (std::uint64_t{1} << opts.max_depth) * static_cast<std::uint64_t>(opts.n);
        if (largest > opts.dense_cap)
            throw InvalidInput("bench: dense apply refused, N n = " + std::to_string(largest) + " exceeds the cap " +
                               std::to_string(opts.dense_cap));
    }

    BenchReport rep;
    std::vector<double> logn, logt;
    for (int depth = opts.min_depth; depth <= opts.max_depth; ++depth) {
        GridSpec grid(1, depth, static_cast<std::uint64_t>(opts.n));
        SparseParams sp;
        sp.kind = SparseKind::random;
        sp.seed = 1;
        const auto s = gen_sparse(grid, sp);
        const auto op = sparse_operator(s, opts.n);
        Rng rng(static_cast<std::uint64_t>(depth));
        Vec x(static_cast<Eigen::Index>(op.dim()));
        for (auto& v : x) v = rng.normal();
        Vec y;
        BenchRow row;
        row.depth = depth;
        row.cells = grid.cell_count();
        row.seconds = time_per_call([&] { y = op.apply(x); }, opts.repeats, opts.min_batch_seconds);
        if (opts.dense) {
            const Mat a = op.to_dense();
            row.dense_seconds =
                time_per_call([&] { y.noalias() = a * x; }, opts.repeats, opts.min_batch_seconds);
        }
        logn.push_back(std::log(static_cast<double>(row.cells)));
        logt.push_back(std::log(row.seconds));
        rep.rows.push_back(row);
    }
    rep.slope = fit_slope(logn, logt).first;
    rep.slope_ok = rep.slope >= opts.slope_low && rep.slope <= opts.slope_high;
    rep.time_ok = rep.rows.back().seconds < opts.max_seconds;
    return rep;
}

std::string bench_to_json(const BenchReport& report, const BenchOptions& opts, const std::string& digest) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["config_digest"] = digest;
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json e{{"depth", r.depth}, {"cells", r.cells}, {"seconds", r.seconds}};
        if (r.dense_seconds >= 0.0) e["dense_seconds"] = r.dense_seconds;
        rows.push_back(std::move(e));
    }
    j["rows"] = std::move(rows);
    j["slope"] = report.slope;
    j["slope_corridor"] = {opts.slope_low, opts.slope_high};
    j["slope_ok"] = report.slope_ok;
    j["max_seconds"] = opts.max_seconds;
    j["time_ok"] = report.time_ok;
    return j.dump(2) + "\n";
}

} // namespace sparselab
