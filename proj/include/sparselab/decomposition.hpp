#pragma once

#include "sparselab/dyadic_rational.hpp"
#include "sparselab/sparse_collection.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sparselab {

/// Edges (Q, Q') of the graph on S, one per Q' in Ch_S(Q), plus components.
struct SparseGraph {
    std::vector<std::pair<CubeId, CubeId>> edges;
    /// Component label per cube, in the order of SparseCollection::cubes().
    std::vector<std::size_t> component;
    std::size_t component_count = 0;
};

SparseGraph build_graph(const SparseCollection& s);

/// Stopping-time families J^n, n >= 0, with J^0 the component roots.
class Decomposition {
public:
    const std::vector<CubeId>& roots() const noexcept { return families_.front(); }
    /// J^0, J^1, ...; the last family is nonempty unless S is empty.
    const std::vector<std::vector<CubeId>>& families() const noexcept { return families_; }
    std::size_t family_count() const noexcept { return families_.size(); }
    /// J^n, empty when n is beyond the last generation.
    const std::vector<CubeId>& family(std::size_t n) const;

    /// Generation index of q, equal to its edge distance from its root.
    int generation_of(const CubeId& q) const;

    /// d_S(a, b) for nested a, b in S; nullopt when they are not nested.
    std::optional<int> comparable_distance(const CubeId& a, const CubeId& b) const;

private:
    friend Decomposition decompose(const SparseCollection& s);

    const SparseCollection* s_ = nullptr;
    std::vector<std::vector<CubeId>> families_;
    std::vector<int> generation_;
};

/// The decomposition keeps a pointer to `s`; `s` must outlive it.
Decomposition decompose(const SparseCollection& s);

/// J^n(Q): cubes of S strictly inside Q at S-distance n. Empty for n = 0.
std::vector<CubeId> generation(const SparseCollection& s, const CubeId& q, int n);

struct DecayReport {
    bool ok = true;
    /// max over (Q, n >= 1) of 2^n * sum_{J^n(Q)} |Q'| / |Q|; ok iff <= 1.
    DyadicRational worst_scaled_ratio;
    std::optional<CubeId> worst_cube;
    int worst_n = 0;
};

DecayReport verify_decay(const SparseCollection& s);

} // namespace sparselab
