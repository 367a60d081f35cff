#include "sparselab/grid.hpp"

#include "sparselab/errors.hpp"

#include <charconv>
#include <cmath>

namespace sparselab {

GridSpec::GridSpec(int dim, int depth, std::uint64_t components, std::uint64_t size_cap)
    : dim_(dim), depth_(depth) {
    if (dim < 1 || dim > 3) throw InvalidInput("grid.dim must be 1, 2 or 3");
    if (depth < 1) throw InvalidInput("grid.depth must be >= 1");
    if (components < 1) throw InvalidInput("component count must be >= 1");
    if (depth * dim > 40) throw InvalidInput("grid.depth too large for dimension");
    if (cell_count() > size_cap / components)
        throw InvalidInput("grid too large: cells * components exceeds size cap");
}

std::uint64_t GridSpec::level_offset(int level) const noexcept {
    // sum_{j < level} 2^{j d} = (2^{level d} - 1) / (2^d - 1)
    const std::uint64_t base = std::uint64_t{1} << dim_;
    return ((std::uint64_t{1} << (level * dim_)) - 1) / (base - 1);
}

bool GridSpec::is_valid(const CubeId& q) const noexcept {
    return q.dim == dim_ && q.level >= 0 && q.level <= depth_ && q.code < cubes_at_level(q.level);
}

void GridSpec::validate(const CubeId& q) const {
    if (q.dim != dim_) throw InvalidInput("cube dimension does not match grid");
    if (q.level < 0 || q.level > depth_)
        throw InvalidInput("cube level out of range: " + std::to_string(q.level));
    if (q.code >= cubes_at_level(q.level)) throw InvalidInput("cube index out of range");
}

CubeId cube_from_index(int dim, int level, const std::array<std::uint64_t, 3>& k) {
    std::uint64_t code = 0;
    for (int b = 0; b < level; ++b) {
        for (int i = 0; i < dim; ++i) {
            const std::uint64_t bit = (k[i] >> b) & 1u;
            code |= bit << (b * dim + i);
        }
    }
    return {dim, level, code};
}

std::array<std::uint64_t, 3> cube_index(const CubeId& q) {
    std::array<std::uint64_t, 3> k{0, 0, 0};
    for (int b = 0; b < q.level; ++b) {
        for (int i = 0; i < q.dim; ++i) {
            const std::uint64_t bit = (q.code >> (b * q.dim + i)) & 1u;
            k[i] |= bit << b;
        }
    }
    return k;
}

DyadicRational measure(const GridSpec& grid, const CubeId& q) {
    grid.validate(q);
    return DyadicRational::pow2_neg(static_cast<unsigned>(q.level * q.dim));
}

std::vector<CubeId> children(const GridSpec& grid, const CubeId& q) {
    grid.validate(q);
    if (q.level == grid.depth()) throw InvalidInput("cube at finest level has no children");
    std::vector<CubeId> out;
    const std::uint64_t fan = std::uint64_t{1} << q.dim;
    out.reserve(fan);
    for (std::uint64_t j = 0; j < fan; ++j) out.push_back({q.dim, q.level + 1, (q.code << q.dim) | j});
    return out;
}

bool contains(const CubeId& outer, const CubeId& inner) noexcept {
    if (outer.dim != inner.dim || inner.level < outer.level) return false;
    return (inner.code >> ((inner.level - outer.level) * inner.dim)) == outer.code;
}

CellRange cell_range(const GridSpec& grid, const CubeId& q) {
    grid.validate(q);
    const int shift = (grid.depth() - q.level) * grid.dim();
    return {q.code << shift, std::uint64_t{1} << shift};
}

std::vector<CubeId> cells(const GridSpec& grid, const CubeId& q) {
    const CellRange r = cell_range(grid, q);
    std::vector<CubeId> out;
    out.reserve(r.count);
    for (std::uint64_t c = r.first; c < r.end(); ++c) out.push_back({grid.dim(), grid.depth(), c});
    return out;
}

std::string to_string(const CubeId& q) {
    const auto k = cube_index(q);
    std::string s = std::to_string(q.level) + ":";
    for (int i = 0; i < q.dim; ++i) {
        if (i) s += ",";
        s += std::to_string(k[i]);
    }
    return s;
}

CubeId parse_cube(std::string_view text, int dim) {
    const auto fail = [&] { return InvalidInput("malformed cube string '" + std::string(text) + "'"); };
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw fail();
    int level = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + colon, level);
    if (ec != std::errc{} || p != text.data() + colon) throw fail();
    if (level < 0 || level * dim > 63) throw fail();
    std::array<std::uint64_t, 3> k{0, 0, 0};
    std::string_view rest = text.substr(colon + 1);
    for (int i = 0; i < dim; ++i) {
        const auto comma = rest.find(',');
        const std::string_view part = rest.substr(0, comma);
        auto [q, ec2] = std::from_chars(part.data(), part.data() + part.size(), k[i]);
        if (ec2 != std::errc{} || q != part.data() + part.size() || part.empty()) throw fail();
        if (k[i] >= (std::uint64_t{1} << level)) throw InvalidInput("cube index out of range in '" + std::string(text) + "'");
        if (i + 1 < dim) {
            if (comma == std::string_view::npos) throw fail();
            rest = rest.substr(comma + 1);
        } else if (comma != std::string_view::npos) {
            throw fail();
        }
    }
    return cube_from_index(dim, level, k);
}

std::array<double, 3> lower_corner(const CubeId& q) {
    const auto k = cube_index(q);
    const double h = side_length(q);
    return {static_cast<double>(k[0]) * h, static_cast<double>(k[1]) * h, static_cast<double>(k[2]) * h};
}

double side_length(const CubeId& q) { return std::ldexp(1.0, -q.level); }

} // namespace sparselab
