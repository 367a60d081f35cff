#include "sparselab/commutators.hpp"
#include "sparselab/corpus.hpp"
#include "sparselab/decomposition.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/experiments.hpp"
#include "sparselab/io.hpp"
#include "sparselab/weighted_operators.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

using namespace sparselab;
using nlohmann::ordered_json;

namespace {

// JSON config: top-level keys are global options, nested objects address the
// subcommand of the same name. Command-line flags win over the file.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool, bool, std::string) const override {
        return dump(app).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        std::stringstream ss;
        ss << in.rdbuf();
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(ss.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw CLI::ParseError(std::string("config: malformed JSON: ") + e.what(), CLI::ExitCodes::ConversionError);
        }
        if (!j.is_object()) throw CLI::ParseError("config: top level must be an object", CLI::ExitCodes::ConversionError);
        std::vector<CLI::ConfigItem> items;
        walk(j, {}, items);
        return items;
    }

    static ordered_json dump(const CLI::App* app) {
        ordered_json j = ordered_json::object();
        for (const CLI::Option* opt : app->get_options()) {
            const std::string name = opt->get_single_name();
            if (name.empty() || name == "help" || name == "config" || name == "out" || name == "threads") continue;
            if (opt->count() > 0) {
                const auto& res = opt->results();
                j[name] = res.size() == 1 ? ordered_json(res.front()) : ordered_json(res);
            } else {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands()) j[sub->get_name()] = dump(sub);
        return j;
    }

private:
    static void walk(const nlohmann::json& j, const std::vector<std::string>& parents,
                     std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto p = parents;
                p.push_back(key);
                walk(value, p, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            auto text = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
            if (value.is_array())
                for (const auto& v : value) item.inputs.push_back(text(v));
            else if (!value.is_null())
                item.inputs.push_back(text(value));
            items.push_back(std::move(item));
        }
    }
};

struct GridArgs {
    int dim = 1;
    int depth = 6;
    int n = 1;
};

void add_grid(CLI::App* sub, GridArgs& g, bool with_n) {
    sub->add_option("--dim", g.dim, "Spatial dimension (1-3)")->capture_default_str();
    sub->add_option("--depth", g.depth, "Finest level L")->capture_default_str();
    if (with_n) sub->add_option("--n", g.n, "Matrix dimension")->capture_default_str();
}

struct SparseArgs {
    std::string kind = "random";
    SparseParams p;
};

void add_sparse_params(CLI::App* sub, SparseArgs& a, const std::string& prefix) {
    sub->add_option("--" + prefix + "kind", a.kind, "chain | lacunary | maximal | random")->capture_default_str();
    sub->add_option("--" + prefix + "seed", a.p.seed)->capture_default_str();
    sub->add_option("--" + prefix + "length", a.p.length, "chain: steps below the root (-1: full depth)")
        ->capture_default_str();
    sub->add_option("--" + prefix + "step", a.p.step, "lacunary/maximal level gap")->capture_default_str();
    sub->add_option("--" + prefix + "fill", a.p.fill, "lacunary fill fraction")->capture_default_str();
    sub->add_option("--" + prefix + "attempts", a.p.attempts, "random: attempts per cube")->capture_default_str();
    sub->add_option("--" + prefix + "branch-prob", a.p.branch_prob)->capture_default_str();
}

SparseParams finish(SparseArgs a) {
    a.p.kind = parse_sparse_kind(a.kind);
    return a.p;
}

struct WeightArgs {
    std::string kind = "power";
    WeightParams p;
    std::vector<double> center;
};

void add_weight_params(CLI::App* sub, WeightArgs& a, const std::string& prefix) {
    sub->add_option("--" + prefix + "kind", a.kind, "constant | power | diag | rotating2d | random_logsym")
        ->capture_default_str();
    sub->add_option("--" + prefix + "seed", a.p.seed)->capture_default_str();
    sub->add_option("--" + prefix + "alpha", a.p.alpha, "power exponent")->capture_default_str();
    sub->add_option("--" + prefix + "center", a.center, "power singularity (1 to 3 coordinates)");
    sub->add_option("--" + prefix + "speed", a.p.speed, "rotating2d angular speed")->capture_default_str();
    sub->add_option("--" + prefix + "spread", a.p.spread, "random_logsym spread")->capture_default_str();
    sub->add_option("--" + prefix + "diag-alphas", a.p.diag_alphas, "diag exponents");
    sub->add_option("--" + prefix + "eig-floor", a.p.eig_floor)->capture_default_str();
}

WeightParams finish(WeightArgs a) {
    a.p.kind = parse_weight_kind(a.kind);
    if (a.center.size() > 3) throw InvalidInput("option 'center' takes 1 to 3 numbers");
    for (std::size_t i = 0; i < 3 && !a.center.empty(); ++i) a.p.center[i] = a.center[std::min(i, a.center.size() - 1)];
    return a.p;
}

struct NormArgs {
    NormOptions opts;
};

void add_norm(CLI::App* app, NormArgs& a) {
    app->add_option("--tol", a.opts.tol, "Lanczos relative residual tolerance")->capture_default_str();
    app->add_option("--max-krylov", a.opts.max_krylov)->capture_default_str();
    app->add_option("--restarts", a.opts.restarts)->capture_default_str();
    app->add_option("--norm-seed", a.opts.seed)->capture_default_str();
    app->add_option("--dense-threshold", a.opts.dense_threshold, "Dense SVD at or below this dimension")
        ->capture_default_str();
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_text_file(out, text);
}

// Adds tool, version and digest to a JSON document produced by the library.
std::string stamp(const std::string& json_text, const std::string& digest) {
    auto body = ordered_json::parse(json_text);
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["config_digest"] = digest;
    for (auto& [k, v] : body.items()) j[k] = v;
    return j.dump(2) + "\n";
}

MatrixWeight load_weight(const std::string& path) { return weight_from_json(read_text_file(path)); }
SparseCollection load_sparse(const std::string& path) { return sparse_from_json(read_text_file(path)); }

int threads_from_env() {
    const char* v = std::getenv("SPARSE_LAB_THREADS");
    if (v == nullptr || *v == '\0') return 1;
    char* end = nullptr;
    const long t = std::strtol(v, &end, 10);
    if (*end != '\0' || t < 1 || t > 1024) throw InvalidInput("SPARSE_LAB_THREADS must be a positive integer");
    return static_cast<int>(t);
}

int report_failures(const RunSummary& summary) {
    for (const auto& inst : summary.results) {
        if (inst.error_code != 0) std::cerr << "error [" << inst.digest << "]: " << inst.error << "\n";
        for (const auto& r : inst.reports)
            if (!r.pass)
                std::cerr << "FAIL " << r.name << " [" << inst.digest << "] lhs=" << r.lhs << " rhs=" << r.rhs
                          << (r.notes.empty() ? "" : " " + r.notes) << "\n";
    }
    std::cerr << summary.checks_run << " checks, " << summary.failures << " failed, exit " << summary.exit_code
              << "\n";
    return summary.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments on sparse operators with matrix weights", "sparse-lab"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file (nested objects configure subcommands)");
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: SPARSE_LAB_THREADS or 1)");
    NormArgs norm;
    add_norm(&app, norm);

    // gen-sparse
    auto* gs = app.add_subcommand("gen-sparse", "Generate a sparse collection");
    GridArgs gs_grid;
    SparseArgs gs_args;
    std::string gs_out;
    add_grid(gs, gs_grid, false);
    add_sparse_params(gs, gs_args, "");
    gs->add_option("--out", gs_out, "Output file (default stdout)");

    // gen-weight
    auto* gw = app.add_subcommand("gen-weight", "Generate a matrix weight");
    GridArgs gw_grid;
    WeightArgs gw_args;
    std::string gw_out;
    add_grid(gw, gw_grid, true);
    add_weight_params(gw, gw_args, "");
    gw->add_option("--out", gw_out, "Output file (default stdout)");

    // gen-symbol
    auto* gb = app.add_subcommand("gen-symbol", "Generate a matrix symbol");
    GridArgs gb_grid;
    std::string gb_kind = "random";
    SymbolParams gb_p;
    std::string gb_out;
    add_grid(gb, gb_grid, true);
    gb->add_option("--kind", gb_kind, "zero | constant | random | step")->capture_default_str();
    gb->add_option("--seed", gb_p.seed)->capture_default_str();
    gb->add_option("--scale", gb_p.scale)->capture_default_str();
    gb->add_option("--step-level", gb_p.step_level)->capture_default_str();
    gb->add_option("--out", gb_out, "Output file (default stdout)");

    // decompose
    auto* dc = app.add_subcommand("decompose", "Stopping-time families of a sparse collection");
    std::string dc_sparse, dc_out;
    dc->add_option("--sparse", dc_sparse, "Sparse collection file")->required();
    dc->add_option("--out", dc_out);

    // constants
    auto* cs = app.add_subcommand("constants", "A_2 and A_inf constants of a weight");
    std::string cs_weight, cs_sparse, cs_out;
    int cs_dirs = 16;
    cs->add_option("--weight", cs_weight, "Weight file")->required();
    cs->add_option("--sparse", cs_sparse, "Sparse collection file (adds [W]_{A_2^S})");
    cs->add_option("--directions", cs_dirs, "Random directions for vector A_inf estimates")->capture_default_str();
    cs->add_option("--out", cs_out);

    // norm
    auto* nm = app.add_subcommand("norm", "||T_S|| on L^2_W");
    std::string nm_sparse, nm_weight, nm_out;
    nm->add_option("--sparse", nm_sparse)->required();
    nm->add_option("--weight", nm_weight)->required();
    nm->add_option("--out", nm_out);

    // cotlar
    auto* ct = app.add_subcommand("cotlar", "Cotlar gap table as CSV");
    std::string ct_sparse, ct_weight, ct_out;
    ct->add_option("--sparse", ct_sparse)->required();
    ct->add_option("--weight", ct_weight)->required();
    ct->add_option("--out", ct_out);

    // check
    auto* ck = app.add_subcommand("check", "Run theorem checks on a corpus or one instance");
    std::vector<std::string> ck_names{"all"};
    std::string ck_corpus = "standard", ck_sparse, ck_weight, ck_out;
    int ck_dirs = 16;
    ck->add_option("checks", ck_names, "all or check names")->capture_default_str();
    ck->add_option("--corpus", ck_corpus, "standard or a corpus-spec file")->capture_default_str();
    ck->add_option("--sparse", ck_sparse, "Single instance: sparse collection file");
    ck->add_option("--weight", ck_weight, "Single instance: weight file (default constant scalar)");
    ck->add_option("--directions", ck_dirs, "Random directions for reduction and A_inf estimates")
        ->capture_default_str();
    ck->add_option("--out", ck_out, "JSON report (default stdout)");

    // commutator
    auto* cm = app.add_subcommand("commutator", "Commutator identities and bounds for one (S, B)");
    std::string cm_sparse, cm_symbol, cm_out;
    cm->add_option("--sparse", cm_sparse)->required();
    cm->add_option("--symbol", cm_symbol)->required();
    cm->add_option("--out", cm_out);

    // sweep
    auto* sw = app.add_subcommand("sweep", "Parameter sweeps as CSV");
    std::string sw_kind = "alpha", sw_family = "power_chain", sw_out;
    GridArgs sw_grid;
    SparseArgs sw_sparse;
    WeightArgs sw_weight;
    std::vector<double> sw_values, sw_range;
    int sw_chain = -1;
    sw->add_option("kind", sw_kind, "alpha | gap | sharpness")->capture_default_str();
    add_grid(sw, sw_grid, true);
    add_sparse_params(sw, sw_sparse, "sparse-");
    add_weight_params(sw, sw_weight, "weight-");
    sw->add_option("--values", sw_values, "Parameter values");
    sw->add_option("--range", sw_range, "START STOP STEP (inclusive)")->expected(3);
    sw->add_option("--family", sw_family, "sharpness: constant | power_chain | rotating_maximal")
        ->capture_default_str();
    sw->add_option("--chain-length", sw_chain, "sharpness power_chain length (-1: full depth)")
        ->capture_default_str();
    sw->add_option("--out", sw_out);

    // bench
    auto* bn = app.add_subcommand("bench", "Matrix-free apply timing");
    BenchOptions bo;
    std::string bn_out;
    bn->add_option("--min-depth", bo.min_depth)->capture_default_str();
    bn->add_option("--max-depth", bo.max_depth)->capture_default_str();
    bn->add_option("--n", bo.n)->capture_default_str();
    bn->add_option("--repeats", bo.repeats)->capture_default_str();
    bn->add_option("--min-batch", bo.min_batch_seconds, "Seconds per timing batch")->capture_default_str();
    bn->add_flag("--dense", bo.dense, "Also time the dense apply");
    bn->add_option("--dense-cap", bo.dense_cap, "Largest N n for the dense apply")->capture_default_str();
    bn->add_option("--max-seconds", bo.max_seconds, "Per-apply limit at max depth")->capture_default_str();
    bn->add_option("--slope-low", bo.slope_low)->capture_default_str();
    bn->add_option("--slope-high", bo.slope_high)->capture_default_str();
    bn->add_option("--out", bn_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_invalid_input;
    }

    std::string digest;
    try {
        std::string canonical = JsonConfig::dump(&app).dump();
        if (ck->parsed() && ck_sparse.empty() && ck_corpus != "standard") canonical += read_text_file(ck_corpus);
        if (ck->parsed() && ck_corpus == "standard") canonical += standard_corpus_json();
        for (const std::string* f : {&dc_sparse, &cs_weight, &cs_sparse, &nm_sparse, &nm_weight, &ct_sparse,
                                     &ct_weight, &ck_sparse, &ck_weight, &cm_sparse, &cm_symbol})
            if (!f->empty()) canonical += read_text_file(*f);
        digest = config_digest(canonical);

        const int nthreads = threads > 0 ? threads : threads_from_env();

        if (gs->parsed()) {
            GridSpec grid(gs_grid.dim, gs_grid.depth);
            emit(gs_out, stamp(sparse_to_json(gen_sparse(grid, finish(gs_args))), digest));
        } else if (gw->parsed()) {
            GridSpec grid(gw_grid.dim, gw_grid.depth, static_cast<std::uint64_t>(gw_grid.n));
            emit(gw_out, stamp(weight_to_json(gen_weight(grid, gw_grid.n, finish(gw_args))), digest));
        } else if (gb->parsed()) {
            GridSpec grid(gb_grid.dim, gb_grid.depth, static_cast<std::uint64_t>(gb_grid.n));
            gb_p.kind = parse_symbol_kind(gb_kind);
            emit(gb_out, stamp(symbol_to_json(gen_symbol(grid, gb_grid.n, gb_p)), digest));
        } else if (dc->parsed()) {
            const auto s = load_sparse(dc_sparse);
            emit(dc_out, stamp(decomposition_to_json(decompose(s)), digest));
        } else if (cs->parsed()) {
            const auto w = load_weight(cs_weight);
            ordered_json j;
            j["tool"] = kToolName;
            j["version"] = kToolVersion;
            j["config_digest"] = digest;
            j["n"] = w.n();
            j["a2_full"] = a2_constant(w).value;
            if (!cs_sparse.empty()) {
                const auto s = load_sparse(cs_sparse);
                if (s.grid() != w.grid()) throw InvalidInput("constants: sparse and weight grids differ");
                j["a2_sparse"] = a2_constant(w, s.cubes()).value;
            }
            const auto a = vector_ainf_estimate(w, cs_dirs, 7);
            const auto ad = vector_ainf_estimate(inverse_weight(w), cs_dirs, 7);
            j["ainf"] = a.value;
            j["ainf_dual"] = ad.value;
            j["ainf_exact"] = a.exact;
            emit(cs_out, j.dump(2) + "\n");
        } else if (nm->parsed()) {
            const auto s = load_sparse(nm_sparse);
            const auto w = load_weight(nm_weight);
            if (s.grid() != w.grid()) throw InvalidInput("norm: sparse and weight grids differ");
            emit(nm_out, stamp(norm_report_to_json(weighted_norm(sparse_operator(s, w.n()), w, norm.opts)), digest));
        } else if (ct->parsed()) {
            const auto s = load_sparse(ct_sparse);
            const auto w = load_weight(ct_weight);
            emit(ct_out, cotlar_csv(s, w, norm.opts, digest));
        } else if (ck->parsed()) {
            RunOptions ro;
            ro.checks = ck_names;
            ro.norm = norm.opts;
            ro.threads = nthreads;
            ro.reduction_directions = ck_dirs;
            RunSummary summary;
            if (!ck_sparse.empty()) {
                const auto s = load_sparse(ck_sparse);
                InstanceResult res;
                res.digest = "sparse=" + ck_sparse + (ck_weight.empty() ? "" : " weight=" + ck_weight);
                std::optional<MatrixWeight> w;
                if (ck_weight.empty())
                    w.emplace(s.grid(), 1, std::vector<double>(s.grid().cell_count(), 1.0));
                else
                    w.emplace(load_weight(ck_weight));
                if (s.grid() != w->grid()) throw InvalidInput("check: sparse and weight grids differ");
                try {
                    res.reports = run_instance_checks(s, *w, ro);
                    for (auto& r : res.reports) r.digest = res.digest;
                } catch (const NumericalError& e) {
                    res.error_code = exit_nonconvergence;
                    res.error = e.what();
                }
                record(summary, std::move(res));
            } else {
                summary = run_corpus(load_corpus(ck_corpus), ro);
            }
            emit(ck_out, summary_to_json(summary, digest));
            return report_failures(summary);
        } else if (cm->parsed()) {
            const auto s = load_sparse(cm_sparse);
            const auto b = symbol_from_json(read_text_file(cm_symbol));
            if (s.grid() != b.grid()) throw InvalidInput("commutator: sparse and symbol grids differ");
            RunOptions ro;
            ro.norm = norm.opts;
            InstanceResult res;
            res.digest = "sparse=" + cm_sparse + " symbol=" + cm_symbol;
            try {
                res.reports = run_symbol_checks(s, b, ro);
                for (auto& r : res.reports) r.digest = res.digest;
            } catch (const NumericalError& e) {
                res.error_code = exit_nonconvergence;
                res.error = e.what();
            }
            RunSummary summary;
            record(summary, std::move(res));
            emit(cm_out, summary_to_json(summary, digest));
            return report_failures(summary);
        } else if (sw->parsed()) {
            SweepConfig c;
            c.kind = parse_sweep_kind(sw_kind);
            c.dim = sw_grid.dim;
            c.depth = sw_grid.depth;
            c.n = sw_grid.n;
            c.sparse = finish(sw_sparse);
            c.weight = finish(sw_weight);
            c.family = parse_sweep_family(sw_family);
            c.chain_length = sw_chain;
            c.values = sw_values;
            if (!sw_range.empty()) {
                const double start = sw_range[0], stop = sw_range[1], step = sw_range[2];
                if (!(step > 0.0) || !(start <= stop)) throw InvalidInput("sweep: empty range");
                const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
                if (count > 100000) throw InvalidInput("sweep: range has too many points");
                for (long i = 0; i < count; ++i) c.values.push_back(start + static_cast<double>(i) * step);
            }
            emit(sw_out, run_sweep(c, norm.opts, digest));
        } else if (bn->parsed()) {
            const auto rep = run_bench(bo);
            emit(bn_out, bench_to_json(rep, bo, digest));
            if (!rep.slope_ok || !rep.time_ok) {
                std::cerr << "bench: slope " << rep.slope << " (corridor [" << bo.slope_low << ", " << bo.slope_high
                          << "]), max-depth apply " << rep.rows.back().seconds << " s (limit " << bo.max_seconds
                          << " s); timings look unstable, rerun with more --repeats or a larger --min-batch"
                          << " [config " << digest << "]\n";
                return exit_nonconvergence;
            }
        }
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << " [config " << digest << "]\n";
        return exit_invalid_input;
    } catch (const NumericalError& e) {
        std::cerr << "numerical non-convergence: " << e.what() << " (last " << e.last_value() << ", residual "
                  << e.residual() << ") [config " << digest << "]\n";
        return exit_nonconvergence;
    }
    return exit_ok;
}
