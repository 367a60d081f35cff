#include "sparselab/corpus.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"

#include <json.hpp>

#include <sstream>

namespace sparselab {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
}

template <class T>
T take(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidInput("field '" + key + "' has the wrong type");
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw InvalidInput(std::string(where) + " must be an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) throw InvalidInput(std::string(where) + ": unknown field '" + item.key() + "'");
    }
}

SparseParams sparse_from(const json& j) {
    reject_unknown(j, {"kind", "seed", "length", "step", "fill", "attempts", "branch_prob"}, "sparse");
    SparseParams p;
    p.kind = parse_sparse_kind(take<std::string>(j, "kind", "chain"));
    p.seed = take<std::uint64_t>(j, "seed", p.seed);
    p.length = take<int>(j, "length", p.length);
    p.step = take<int>(j, "step", p.step);
    p.fill = take<double>(j, "fill", p.fill);
    p.attempts = take<int>(j, "attempts", p.attempts);
    p.branch_prob = take<double>(j, "branch_prob", p.branch_prob);
    return p;
}

WeightParams weight_from(const json& j) {
    reject_unknown(j, {"kind", "seed", "alpha", "center", "speed", "spread", "diag_alphas", "eig_floor"}, "weight");
    WeightParams p;
    p.kind = parse_weight_kind(take<std::string>(j, "kind", "constant"));
    p.seed = take<std::uint64_t>(j, "seed", p.seed);
    p.alpha = take<double>(j, "alpha", p.alpha);
    if (j.contains("center")) {
        const auto c = take<std::vector<double>>(j, "center", {});
        if (c.empty() || c.size() > 3) throw InvalidInput("field 'center' must hold 1 to 3 numbers");
        for (std::size_t i = 0; i < 3; ++i) p.center[i] = c[std::min(i, c.size() - 1)];
    }
    p.speed = take<double>(j, "speed", p.speed);
    p.spread = take<double>(j, "spread", p.spread);
    p.diag_alphas = take<std::vector<double>>(j, "diag_alphas", {});
    p.eig_floor = take<double>(j, "eig_floor", p.eig_floor);
    return p;
}

SymbolParams symbol_from(const json& j) {
    reject_unknown(j, {"kind", "seed", "scale", "step_level"}, "symbol");
    SymbolParams p;
    p.kind = parse_symbol_kind(take<std::string>(j, "kind", "random"));
    p.seed = take<std::uint64_t>(j, "seed", p.seed);
    p.scale = take<double>(j, "scale", p.scale);
    p.step_level = take<int>(j, "step_level", p.step_level);
    return p;
}

std::vector<std::pair<int, int>> grids_from(const json& j) {
    std::vector<std::pair<int, int>> out;
    if (!j.contains("grids") || !j.at("grids").is_array()) throw InvalidInput("missing field 'grids'");
    for (const auto& g : j.at("grids")) {
        reject_unknown(g, {"dim", "depth"}, "grids");
        out.emplace_back(take<int>(g, "dim", 1), take<int>(g, "depth", 6));
    }
    return out;
}

const json& list(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw InvalidInput(std::string("missing array field '") + key + "'");
    return j.at(key);
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss << x;
    return ss.str();
}

} // namespace

Corpus corpus_from_json(const std::string& text) {
    const json j = parse(text);
    reject_unknown(j, {"format", "name", "instances", "symbols"}, "corpus");
    if (take<std::string>(j, "format", "") != "corpus-spec") throw InvalidInput("field 'format': expected 'corpus-spec'");
    Corpus c;
    c.name = take<std::string>(j, "name", "custom");
    if (j.contains("instances")) {
        const json& spec = j.at("instances");
        reject_unknown(spec, {"grids", "sparse", "weights", "n"}, "instances");
        const auto grids = grids_from(spec);
        const auto ns = take<std::vector<int>>(spec, "n", {});
        for (const auto& [dim, depth] : grids)
            for (const auto& sp : list(spec, "sparse"))
                for (const auto& wp : list(spec, "weights"))
                    for (int n : ns) {
                        InstanceSpec inst{dim, depth, n, sparse_from(sp), weight_from(wp)};
                        if (inst.weight.kind == WeightKind::rotating2d && n % 2 != 0) continue;
                        c.instances.push_back(inst);
                    }
    }
    if (j.contains("symbols")) {
        const json& spec = j.at("symbols");
        reject_unknown(spec, {"grids", "sparse", "symbols", "n"}, "symbols");
        const auto grids = grids_from(spec);
        const auto ns = take<std::vector<int>>(spec, "n", {});
        for (const auto& [dim, depth] : grids)
            for (const auto& sp : list(spec, "sparse"))
                for (const auto& bp : list(spec, "symbols"))
                    for (int n : ns) c.symbols.push_back({dim, depth, n, sparse_from(sp), symbol_from(bp)});
    }
    if (c.instances.empty() && c.symbols.empty()) throw InvalidInput("corpus is empty");
    return c;
}

const std::string& standard_corpus_json() {
    static const std::string text =
#include "standard_corpus.inc"
        ;
    return text;
}

Corpus standard_corpus() { return corpus_from_json(standard_corpus_json()); }

Corpus load_corpus(const std::string& name_or_path) {
    if (name_or_path == "standard") return standard_corpus();
    return corpus_from_json(read_text_file(name_or_path));
}

namespace {

std::string describe_sparse(const SparseParams& p) {
    std::string s = to_string(p.kind) + "(seed=" + std::to_string(p.seed);
    if (p.kind == SparseKind::chain && p.length >= 0) s += ",length=" + std::to_string(p.length);
    if (p.kind == SparseKind::maximal || p.kind == SparseKind::lacunary) s += ",step=" + std::to_string(p.step);
    if (p.kind == SparseKind::lacunary) s += ",fill=" + fmt(p.fill);
    return s + ")";
}

} // namespace

std::string describe(const InstanceSpec& spec) {
    const auto& w = spec.weight;
    std::string ws = to_string(w.kind) + "(";
    switch (w.kind) {
    case WeightKind::constant: break;
    case WeightKind::power:
    case WeightKind::diag: ws += "alpha=" + fmt(w.alpha) + ",center=" + fmt(w.center[0]); break;
    case WeightKind::rotating2d: ws += "alpha=" + fmt(w.alpha) + ",speed=" + fmt(w.speed); break;
    case WeightKind::random_logsym: ws += "seed=" + std::to_string(w.seed) + ",spread=" + fmt(w.spread); break;
    }
    ws += ")";
    return "d=" + std::to_string(spec.dim) + " L=" + std::to_string(spec.depth) + " n=" + std::to_string(spec.n) +
           " sparse=" + describe_sparse(spec.sparse) + " weight=" + ws;
}

std::string describe(const SymbolInstanceSpec& spec) {
    const auto& b = spec.symbol;
    std::string bs = to_string(b.kind) + "(seed=" + std::to_string(b.seed) + ",scale=" + fmt(b.scale);
    if (b.kind == SymbolKind::step) bs += ",level=" + std::to_string(b.step_level);
    bs += ")";
    return "d=" + std::to_string(spec.dim) + " L=" + std::to_string(spec.depth) + " n=" + std::to_string(spec.n) +
           " sparse=" + describe_sparse(spec.sparse) + " symbol=" + bs;
}

SparseCollection build_sparse(const InstanceSpec& spec) {
    return gen_sparse(GridSpec(spec.dim, spec.depth, static_cast<std::uint64_t>(spec.n)), spec.sparse);
}

MatrixWeight build_weight(const InstanceSpec& spec) {
    return gen_weight(GridSpec(spec.dim, spec.depth, static_cast<std::uint64_t>(spec.n)), spec.n, spec.weight);
}

SparseCollection build_sparse(const SymbolInstanceSpec& spec) {
    return gen_sparse(GridSpec(spec.dim, spec.depth, static_cast<std::uint64_t>(2 * spec.n)), spec.sparse);
}

SymbolFn build_symbol(const SymbolInstanceSpec& spec) {
    return gen_symbol(GridSpec(spec.dim, spec.depth, static_cast<std::uint64_t>(2 * spec.n)), spec.n, spec.symbol);
}

SparseParams sparse_params_from_json(const std::string& text) { return sparse_from(parse(text)); }
WeightParams weight_params_from_json(const std::string& text) { return weight_from(parse(text)); }
SymbolParams symbol_params_from_json(const std::string& text) { return symbol_from(parse(text)); }

} // namespace sparselab
