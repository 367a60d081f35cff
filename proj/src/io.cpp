#include "sparselab/io.hpp"

#include "sparselab/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sparselab {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write file '" + path + "'");
    out << text;
    if (!out) throw InvalidInput("write failed for '" + path + "'");
}

namespace {

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
}

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw InvalidInput(std::string("missing field '") + name + "'");
    return j.at(name);
}

template <class T>
T get_as(const json& j, const char* name) {
    const json& v = field(j, name);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw InvalidInput(std::string("field '") + name + "' has the wrong type");
    }
}

void expect_format(const json& j, const char* format) {
    const auto f = get_as<std::string>(j, "format");
    if (f != format) throw InvalidInput("field 'format': expected '" + std::string(format) + "', got '" + f + "'");
}

json grid_json(const GridSpec& g) { return {{"dim", g.dim()}, {"depth", g.depth()}}; }

GridSpec grid_from(const json& j, std::uint64_t components, std::uint64_t cap) {
    const json& g = field(j, "grid");
    const int dim = get_as<int>(g, "dim");
    const int depth = get_as<int>(g, "depth");
    try {
        return GridSpec(dim, depth, components, cap);
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string("field 'grid': ") + e.what());
    }
}

json matrices_json(const std::vector<double>& v, int n, std::uint64_t cells) {
    json out = json::array();
    const std::size_t st = static_cast<std::size_t>(n) * n;
    for (std::uint64_t c = 0; c < cells; ++c) {
        json cell = json::array();
        // Storage is column-major; emit row-major.
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k) cell.push_back(v[c * st + static_cast<std::size_t>(k) * n + r]);
        out.push_back(std::move(cell));
    }
    return out;
}

std::vector<double> matrices_from(const json& j, int n, std::uint64_t cells) {
    const json& vals = field(j, "values");
    if (!vals.is_array() || vals.size() != cells)
        throw InvalidInput("field 'values': expected " + std::to_string(cells) + " cell matrices");
    const std::size_t st = static_cast<std::size_t>(n) * n;
    std::vector<double> out(cells * st);
    for (std::uint64_t c = 0; c < cells; ++c) {
        const json& cell = vals[c];
        if (!cell.is_array() || cell.size() != st)
            throw InvalidInput("field 'values': cell " + std::to_string(c) + " must hold " + std::to_string(st) +
                               " numbers");
        for (int r = 0; r < n; ++r) {
            for (int k = 0; k < n; ++k) {
                const json& x = cell[static_cast<std::size_t>(r) * n + k];
                if (!x.is_number())
                    throw InvalidInput("field 'values': cell " + std::to_string(c) + " has a non-numeric entry");
                out[c * st + static_cast<std::size_t>(k) * n + r] = x.get<double>();
            }
        }
    }
    return out;
}

} // namespace

std::string sparse_to_json(const SparseCollection& s) {
    json cubes = json::array();
    for (const auto& q : s.cubes()) cubes.push_back(to_string(q));
    const json j{{"format", "sparse-collection"}, {"grid", grid_json(s.grid())}, {"cubes", cubes}};
    return j.dump(1) + "\n";
}

SparseCollection sparse_from_json(const std::string& text, std::size_t max_cubes) {
    const json j = parse(text);
    expect_format(j, "sparse-collection");
    const GridSpec g = grid_from(j, 1, kDefaultSizeCap);
    const json& arr = field(j, "cubes");
    if (!arr.is_array()) throw InvalidInput("field 'cubes' must be an array");
    if (arr.size() > max_cubes) throw InvalidInput("field 'cubes': more cubes than the configured cap");
    std::vector<CubeId> cubes;
    for (const auto& c : arr) {
        if (!c.is_string()) throw InvalidInput("field 'cubes': entries must be strings");
        try {
            const CubeId q = parse_cube(c.get<std::string>(), g.dim());
            g.validate(q);
            cubes.push_back(q);
        } catch (const InvalidInput& e) {
            throw InvalidInput("field 'cubes': " + std::string(e.what()));
        }
    }
    return SparseCollection(g, std::move(cubes), max_cubes);
}

std::string weight_to_json(const MatrixWeight& w) {
    const json j{{"format", "matrix-weight"}, {"grid", grid_json(w.grid())},
                 {"n", w.n()},                {"kind", w.kind},
                 {"seed", w.seed},            {"values", matrices_json(w.values(), w.n(), w.grid().cell_count())}};
    return j.dump() + "\n";
}

MatrixWeight weight_from_json(const std::string& text, std::uint64_t size_cap) {
    const json j = parse(text);
    expect_format(j, "matrix-weight");
    const int n = get_as<int>(j, "n");
    if (n < 1) throw InvalidInput("field 'n' must be >= 1");
    const GridSpec g = grid_from(j, static_cast<std::uint64_t>(n), size_cap);
    auto values = matrices_from(j, n, g.cell_count());
    try {
        MatrixWeight w(g, n, std::move(values));
        if (j.contains("kind")) w.kind = get_as<std::string>(j, "kind");
        if (j.contains("seed")) w.seed = get_as<std::uint64_t>(j, "seed");
        return w;
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string("field 'values': ") + e.what());
    }
}

std::string symbol_to_json(const SymbolFn& b) {
    const json j{{"format", "matrix-symbol"}, {"grid", grid_json(b.grid())},
                 {"n", b.n()},                {"kind", b.kind},
                 {"seed", b.seed},            {"psd", false},
                 {"values", matrices_json(b.values(), b.n(), b.grid().cell_count())}};
    return j.dump() + "\n";
}

SymbolFn symbol_from_json(const std::string& text, std::uint64_t size_cap) {
    const json j = parse(text);
    expect_format(j, "matrix-symbol");
    const int n = get_as<int>(j, "n");
    if (n < 1) throw InvalidInput("field 'n' must be >= 1");
    const GridSpec g = grid_from(j, static_cast<std::uint64_t>(2 * n), size_cap);
    try {
        SymbolFn b(g, n, matrices_from(j, n, g.cell_count()));
        if (j.contains("kind")) b.kind = get_as<std::string>(j, "kind");
        if (j.contains("seed")) b.seed = get_as<std::uint64_t>(j, "seed");
        return b;
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        if (msg.rfind("field", 0) == 0) throw;
        throw InvalidInput("field 'values': " + msg);
    }
}

std::string decomposition_to_json(const Decomposition& dec) {
    json j = json::object();
    for (std::size_t k = 0; k < dec.family_count(); ++k) {
        json arr = json::array();
        for (const auto& q : dec.family(k)) arr.push_back(to_string(q));
        j[std::to_string(k)] = std::move(arr);
    }
    // Keys sort lexicographically in nlohmann::json; emit numerically ordered.
    std::string out = "{\n";
    for (std::size_t k = 0; k < dec.family_count(); ++k) {
        out += " \"" + std::to_string(k) + "\": " + j[std::to_string(k)].dump();
        out += k + 1 < dec.family_count() ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

std::string norm_report_to_json(const NormReport& r) {
    const json j{{"norm", r.norm}, {"residual", r.residual}, {"iterations", r.iterations}, {"method", r.method}};
    return j.dump(1) + "\n";
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace sparselab
