#include "sparselab/decomposition.hpp"

#include "sparselab/errors.hpp"

#include <algorithm>
#include <numeric>

namespace sparselab {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

SparseGraph build_graph(const SparseCollection& s) {
    SparseGraph g;
    UnionFind uf(s.size());
    for (const auto& q : s.cubes()) {
        for (const auto& c : s.s_children(q)) {
            g.edges.emplace_back(q, c);
            uf.unite(s.index_of(q), s.index_of(c));
        }
    }
    g.component.resize(s.size());
    std::vector<std::size_t> label(s.size(), SIZE_MAX);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::size_t r = uf.find(i);
        if (label[r] == SIZE_MAX) label[r] = g.component_count++;
        g.component[i] = label[r];
    }
    return g;
}

const std::vector<CubeId>& Decomposition::family(std::size_t n) const {
    static const std::vector<CubeId> empty;
    return n < families_.size() ? families_[n] : empty;
}

int Decomposition::generation_of(const CubeId& q) const { return generation_[s_->index_of(q)]; }

std::optional<int> Decomposition::comparable_distance(const CubeId& a, const CubeId& b) const {
    const int ga = generation_of(a);
    const int gb = generation_of(b);
    if (contains(a, b) || contains(b, a)) return ga > gb ? ga - gb : gb - ga;
    return std::nullopt;
}

Decomposition decompose(const SparseCollection& s) {
    Decomposition d;
    d.s_ = &s;
    d.generation_.assign(s.size(), -1);
    std::vector<CubeId> current;
    for (const auto& q : s.cubes())
        if (!s.s_parent(q)) current.push_back(q);
    int n = 0;
    while (!current.empty()) {
        std::vector<CubeId> next;
        for (const auto& q : current) {
            d.generation_[s.index_of(q)] = n;
            const auto& ch = s.s_children(q);
            next.insert(next.end(), ch.begin(), ch.end());
        }
        std::sort(next.begin(), next.end());
        d.families_.push_back(std::move(current));
        current = std::move(next);
        ++n;
    }
    if (d.families_.empty()) d.families_.emplace_back();
    return d;
}

std::vector<CubeId> generation(const SparseCollection& s, const CubeId& q, int n) {
    if (!s.contains_cube(q)) throw InvalidInput("cube " + to_string(q) + " is not in the collection");
    if (n < 0) throw InvalidInput("generation index must be >= 0");
    if (n == 0) return {};
    std::vector<CubeId> current{q};
    for (int i = 0; i < n && !current.empty(); ++i) {
        std::vector<CubeId> next;
        for (const auto& c : current) {
            const auto& ch = s.s_children(c);
            next.insert(next.end(), ch.begin(), ch.end());
        }
        current = std::move(next);
    }
    std::sort(current.begin(), current.end());
    return current;
}

DecayReport verify_decay(const SparseCollection& s) {
    DecayReport report;
    const GridSpec& g = s.grid();
    for (const auto& q : s.cubes()) {
        std::vector<CubeId> current{q};
        for (int n = 1;; ++n) {
            std::vector<CubeId> next;
            std::uint64_t covered = 0;
            for (const auto& c : current) {
                for (const auto& ch : s.s_children(c)) {
                    next.push_back(ch);
                    covered += g.cells_per_cube(ch.level);
                }
            }
            if (next.empty()) break;
            // covered / |Q| * 2^n, exact: the shift is nonnegative because
            // n generations are at least n levels below Q.
            const int shift = (g.depth() - q.level) * g.dim() - n;
            const DyadicRational scaled(covered, static_cast<unsigned>(shift));
            if (scaled > report.worst_scaled_ratio) {
                report.worst_scaled_ratio = scaled;
                report.worst_cube = q;
                report.worst_n = n;
            }
            if (scaled > DyadicRational::one()) report.ok = false;
            current = std::move(next);
        }
    }
    return report;
}

} // namespace sparselab
