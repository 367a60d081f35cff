#include "sparselab/sparse_collection.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/rng.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace sparselab {

SparseCollection::SparseCollection(GridSpec grid, std::vector<CubeId> cubes, std::size_t max_cubes)
    : grid_(grid), cubes_(std::move(cubes)) {
    if (cubes_.size() > max_cubes) throw InvalidInput("sparse collection exceeds the cube cap");
    for (const auto& q : cubes_) grid_.validate(q);
    std::sort(cubes_.begin(), cubes_.end());
    cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());

    index_.reserve(cubes_.size() * 2);
    for (std::size_t i = 0; i < cubes_.size(); ++i) index_.emplace(cubes_[i], i);

    mask_.resize(grid_.depth() + 1);
    for (const auto& q : cubes_) {
        auto& level = mask_[q.level];
        if (level.empty()) level.assign(grid_.cubes_at_level(q.level), 0);
        level[q.code] = 1;
    }

    children_.resize(cubes_.size());
    parent_.resize(cubes_.size());
    for (std::size_t i = 0; i < cubes_.size(); ++i) {
        CubeId a = cubes_[i];
        while (a.level > 0) {
            a = a.parent();
            const auto it = index_.find(a);
            if (it != index_.end()) {
                parent_[i] = a;
                children_[it->second].push_back(cubes_[i]);
                break;
            }
        }
    }
}

std::size_t SparseCollection::index_of(const CubeId& q) const {
    const auto it = index_.find(q);
    if (it == index_.end()) throw InvalidInput("cube " + to_string(q) + " is not in the collection");
    return it->second;
}

const std::vector<CubeId>& SparseCollection::s_children(const CubeId& q) const {
    return children_[index_of(q)];
}

std::optional<CubeId> SparseCollection::s_parent(const CubeId& q) const { return parent_[index_of(q)]; }

SparsenessReport verify_sparse(const SparseCollection& s) {
    SparsenessReport report;
    const GridSpec& g = s.grid();
    for (const auto& q : s.cubes()) {
        std::uint64_t covered = 0;
        for (const auto& c : s.s_children(q)) covered += g.cells_per_cube(c.level);
        const DyadicRational ratio(covered, static_cast<unsigned>((g.depth() - q.level) * g.dim()));
        if (ratio > report.worst_ratio) {
            report.worst_ratio = ratio;
            if (ratio > DyadicRational::half()) {
                report.ok = false;
                report.offender = q;
            }
        }
    }
    return report;
}

WeakSparseReport verify_weak_sparse(const SparseCollection& s, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("gamma must lie in (0, 1)");
    const GridSpec& g = s.grid();
    WeakSparseReport report;
    report.gamma = gamma;
    report.min_ratio = DyadicRational::one();
    std::vector<std::uint8_t> owned(g.cell_count(), 0);
    std::vector<std::uint8_t> removed(g.cell_count(), 0);
    report.exceptional_sets.reserve(s.size());
    for (const auto& q : s.cubes()) {
        const CellRange r = cell_range(g, q);
        for (const auto& c : s.s_children(q)) {
            const CellRange rc = cell_range(g, c);
            std::fill(removed.begin() + rc.first, removed.begin() + rc.end(), 1);
        }
        std::vector<std::uint64_t> e;
        for (std::uint64_t i = r.first; i < r.end(); ++i) {
            if (removed[i]) continue;
            e.push_back(i);
            if (owned[i]) report.disjoint = false;
            owned[i] = 1;
        }
        for (const auto& c : s.s_children(q)) {
            const CellRange rc = cell_range(g, c);
            std::fill(removed.begin() + rc.first, removed.begin() + rc.end(), 0);
        }
        const DyadicRational ratio(e.size(), static_cast<unsigned>((g.depth() - q.level) * g.dim()));
        if (ratio < report.min_ratio) report.min_ratio = ratio;
        if (static_cast<long double>(e.size()) < static_cast<long double>(gamma) * r.count) {
            if (!report.offender) report.offender = q;
            report.ok = false;
        }
        report.exceptional_sets.push_back(std::move(e));
    }
    if (!report.disjoint) report.ok = false;
    return report;
}

SparseKind parse_sparse_kind(const std::string& name) {
    if (name == "chain") return SparseKind::chain;
    if (name == "lacunary") return SparseKind::lacunary;
    if (name == "maximal") return SparseKind::maximal;
    if (name == "random") return SparseKind::random;
    throw InvalidInput("unknown sparse kind '" + name + "'");
}

std::string to_string(SparseKind kind) {
    switch (kind) {
    case SparseKind::chain: return "chain";
    case SparseKind::lacunary: return "lacunary";
    case SparseKind::maximal: return "maximal";
    case SparseKind::random: return "random";
    }
    return "?";
}

namespace {

// k distinct values from [0, n) in increasing order (partial Fisher-Yates).
std::vector<std::uint64_t> choose_subset(Rng& rng, std::uint64_t n, std::uint64_t k) {
    std::vector<std::uint64_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::uint64_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<CubeId> gen_chain(const GridSpec& g, const SparseParams& p, Rng& rng) {
    const int length = p.length < 0 ? g.depth() : p.length;
    if (length > g.depth()) throw InvalidInput("chain length exceeds grid depth");
    std::vector<CubeId> out{g.root()};
    CubeId q = g.root();
    for (int i = 0; i < length; ++i) {
        q = {g.dim(), q.level + 1, (q.code << g.dim()) | rng.below(std::uint64_t{1} << g.dim())};
        out.push_back(q);
    }
    return out;
}

// Each selected cube receives `keep` of its 2^{step d} descendants `step`
// levels down.
std::vector<CubeId> gen_layered(const GridSpec& g, int step, std::uint64_t keep, Rng& rng) {
    const int shift = step * g.dim();
    const std::uint64_t fan = std::uint64_t{1} << shift;
    std::vector<CubeId> out{g.root()};
    std::vector<CubeId> frontier{g.root()};
    while (!frontier.empty() && frontier.front().level + step <= g.depth()) {
        std::vector<CubeId> next;
        for (const auto& q : frontier) {
            for (auto j : choose_subset(rng, fan, keep))
                next.push_back({g.dim(), q.level + step, (q.code << shift) | j});
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

std::vector<CubeId> gen_random(const GridSpec& g, const SparseParams& p, Rng& rng) {
    if (p.attempts < 0) throw InvalidInput("random: attempts must be >= 0");
    if (!(p.branch_prob >= 0.0 && p.branch_prob <= 1.0))
        throw InvalidInput("random: branch_prob must lie in [0, 1]");
    std::vector<CubeId> out{g.root()};
    std::deque<CubeId> queue{g.root()};
    while (!queue.empty()) {
        const CubeId q = queue.front();
        queue.pop_front();
        if (q.level == g.depth()) continue;
        const std::uint64_t budget = g.cells_per_cube(q.level) / 2;
        std::uint64_t used = 0;
        std::vector<CubeId> picked;
        for (int a = 0; a < p.attempts; ++a) {
            // Geometric level offset favours large children.
            int level = q.level + 1;
            while (level < g.depth() && rng.uniform() < 0.5) ++level;
            const int shift = (level - q.level) * g.dim();
            const CubeId c{g.dim(), level, (q.code << shift) | rng.below(std::uint64_t{1} << shift)};
            const std::uint64_t size = g.cells_per_cube(level);
            if (used + size > budget) continue;
            const bool clash = std::any_of(picked.begin(), picked.end(), [&](const CubeId& o) {
                return contains(o, c) || contains(c, o);
            });
            if (clash) continue;
            picked.push_back(c);
            used += size;
        }
        for (const auto& c : picked) {
            out.push_back(c);
            if (rng.uniform() < p.branch_prob) queue.push_back(c);
        }
    }
    return out;
}

} // namespace

SparseCollection gen_sparse(const GridSpec& grid, const SparseParams& params) {
    Rng rng(params.seed);
    std::vector<CubeId> cubes;
    switch (params.kind) {
    case SparseKind::chain:
        cubes = gen_chain(grid, params, rng);
        break;
    case SparseKind::lacunary: {
        if (params.step < 1 || params.step > grid.depth())
            throw InvalidInput("lacunary: step must lie in [1, depth]");
        if (!(params.fill > 0.0 && params.fill <= 0.5)) throw InvalidInput("lacunary: fill must lie in (0, 1/2]");
        const double fan = std::ldexp(1.0, params.step * grid.dim());
        const auto keep = static_cast<std::uint64_t>(params.fill * fan);
        if (keep < 1) throw InvalidInput("lacunary: fill too small for the step (selects no cube)");
        cubes = gen_layered(grid, params.step, keep, rng);
        break;
    }
    case SparseKind::maximal: {
        if (params.step < 1 || params.step > grid.depth())
            throw InvalidInput("maximal: step must lie in [1, depth]");
        const std::uint64_t fan = std::uint64_t{1} << (params.step * grid.dim());
        cubes = gen_layered(grid, params.step, fan / 2, rng);
        break;
    }
    case SparseKind::random:
        cubes = gen_random(grid, params, rng);
        break;
    }
    return SparseCollection(grid, std::move(cubes));
}

} // namespace sparselab
