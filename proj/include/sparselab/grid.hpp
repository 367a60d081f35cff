#pragma once

#include "sparselab/dyadic_rational.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sparselab {

/// Default cap on cells * components for any object on a grid.
inline constexpr std::uint64_t kDefaultSizeCap = std::uint64_t{1} << 24;

/// A dyadic cube 2^{-level}(k + [0,1)^dim) of the unit cube.
///
/// The index vector k is stored as its Morton (bit-interleaved) code, so the
/// children of a cube are code*2^dim + j and the finest cells of a cube form a
/// contiguous range of level-L codes.
struct CubeId {
    int dim = 1;
    int level = 0;
    std::uint64_t code = 0;

    static CubeId root(int dim) { return {dim, 0, 0}; }

    CubeId parent() const { return {dim, level - 1, code >> dim}; }

    auto operator<=>(const CubeId&) const = default;
};

struct CubeIdHash {
    std::size_t operator()(const CubeId& q) const noexcept {
        return std::hash<std::uint64_t>{}(q.code * 131u + static_cast<std::uint64_t>(q.level));
    }
};

/// The finite dyadic tree over [0,1)^dim down to level `depth`.
class GridSpec {
public:
    GridSpec() = default;
    /// Throws InvalidInput unless 1 <= dim <= 3, depth >= 1 and
    /// cells * components <= size_cap.
    GridSpec(int dim, int depth, std::uint64_t components = 1,
             std::uint64_t size_cap = kDefaultSizeCap);

    int dim() const noexcept { return dim_; }
    int depth() const noexcept { return depth_; }
    std::uint64_t cell_count() const noexcept { return std::uint64_t{1} << (depth_ * dim_); }
    std::uint64_t cubes_at_level(int level) const noexcept {
        return std::uint64_t{1} << (level * dim_);
    }
    /// Number of finest cells inside a cube at `level`.
    std::uint64_t cells_per_cube(int level) const noexcept {
        return std::uint64_t{1} << ((depth_ - level) * dim_);
    }
    /// Offset of `level` in a flat array holding every tree cube, root first.
    std::uint64_t level_offset(int level) const noexcept;
    std::uint64_t total_cubes() const noexcept { return level_offset(depth_ + 1); }
    std::uint64_t flat_index(const CubeId& q) const noexcept {
        return level_offset(q.level) + q.code;
    }
    CubeId root() const { return CubeId::root(dim_); }

    bool is_valid(const CubeId& q) const noexcept;
    /// Throws InvalidInput naming the offending field.
    void validate(const CubeId& q) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int dim_ = 1;
    int depth_ = 1;
};

CubeId cube_from_index(int dim, int level, const std::array<std::uint64_t, 3>& k);
std::array<std::uint64_t, 3> cube_index(const CubeId& q);

/// Lebesgue measure 2^{-level*dim}, exact.
DyadicRational measure(const GridSpec& grid, const CubeId& q);

/// The 2^dim dyadic children; throws for a cube at the finest level.
std::vector<CubeId> children(const GridSpec& grid, const CubeId& q);

/// inner ⊆ outer as geometric cubes.
bool contains(const CubeId& outer, const CubeId& inner) noexcept;

/// Level-L cells of q in Morton order.
std::vector<CubeId> cells(const GridSpec& grid, const CubeId& q);

/// [first, first + count) range of finest-cell indices covered by q.
struct CellRange {
    std::uint64_t first = 0;
    std::uint64_t count = 0;
    std::uint64_t end() const noexcept { return first + count; }
};
CellRange cell_range(const GridSpec& grid, const CubeId& q);

/// "level:k1,...,kd"
std::string to_string(const CubeId& q);
CubeId parse_cube(std::string_view text, int dim);

/// Lower corner and side length of the cube in [0,1)^dim.
std::array<double, 3> lower_corner(const CubeId& q);
double side_length(const CubeId& q);

} // namespace sparselab
