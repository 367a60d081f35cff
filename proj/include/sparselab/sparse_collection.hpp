#pragma once

#include "sparselab/dyadic_rational.hpp"
#include "sparselab/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sparselab {

inline constexpr std::size_t kDefaultMaxCubes = std::size_t{1} << 22;

/// A finite set of tree cubes with its S-children and S-parent maps.
///
/// Ch_S(Q) is the set of maximal cubes of S strictly inside Q; Pr_S(Q) is the
/// minimal cube of S strictly containing Q. Immutable after construction.
class SparseCollection {
public:
    SparseCollection(GridSpec grid, std::vector<CubeId> cubes,
                     std::size_t max_cubes = kDefaultMaxCubes);

    const GridSpec& grid() const noexcept { return grid_; }
    /// Cubes sorted by (level, code); no duplicates.
    const std::vector<CubeId>& cubes() const noexcept { return cubes_; }
    std::size_t size() const noexcept { return cubes_.size(); }
    bool contains_cube(const CubeId& q) const { return index_.count(q) != 0; }
    std::size_t index_of(const CubeId& q) const;

    const std::vector<CubeId>& s_children(const CubeId& q) const;
    std::optional<CubeId> s_parent(const CubeId& q) const;

    /// Per-level membership flags, indexed by Morton code.
    const std::vector<std::vector<std::uint8_t>>& level_mask() const noexcept { return mask_; }

private:
    GridSpec grid_;
    std::vector<CubeId> cubes_;
    std::unordered_map<CubeId, std::size_t, CubeIdHash> index_;
    std::vector<std::vector<CubeId>> children_;
    std::vector<std::optional<CubeId>> parent_;
    std::vector<std::vector<std::uint8_t>> mask_;
};

struct SparsenessReport {
    bool ok = true;
    /// max over Q of (sum of |Q'| over Ch_S(Q)) / |Q|
    DyadicRational worst_ratio;
    std::optional<CubeId> offender;
};

SparsenessReport verify_sparse(const SparseCollection& s);

struct WeakSparseReport {
    double gamma = 0.5;
    bool ok = true;
    bool disjoint = true;
    /// min over Q of |E_Q| / |Q|
    DyadicRational min_ratio;
    std::optional<CubeId> offender;
    /// E_Q as finest-cell indices, in the order of SparseCollection::cubes().
    std::vector<std::vector<std::uint64_t>> exceptional_sets;
};

/// E_Q = Q minus the union of its S-children; checks |E_Q| >= gamma|Q| and
/// pairwise disjointness.
WeakSparseReport verify_weak_sparse(const SparseCollection& s, double gamma);

enum class SparseKind { chain, lacunary, maximal, random };

SparseKind parse_sparse_kind(const std::string& name);
std::string to_string(SparseKind kind);

struct SparseParams {
    SparseKind kind = SparseKind::chain;
    std::uint64_t seed = 1;
    /// chain: number of steps below the root (0..L).
    int length = -1;
    /// lacunary / maximal: level gap between a cube and its S-children.
    int step = 1;
    /// lacunary: fraction of the 2^{step d} descendants kept, in (0, 1/2].
    double fill = 0.5;
    /// random: insertion attempts per cube.
    int attempts = 6;
    /// random: probability that an accepted child subtree keeps branching.
    double branch_prob = 0.85;
};

/// Deterministic generator; the result always passes verify_sparse.
SparseCollection gen_sparse(const GridSpec& grid, const SparseParams& params);

} // namespace sparselab
