#pragma once

#include "sparselab/commutators.hpp"
#include "sparselab/decomposition.hpp"
#include "sparselab/matrix_weight.hpp"
#include "sparselab/sparse_collection.hpp"
#include "sparselab/spectral.hpp"
#include "sparselab/theorem_suite.hpp"

#include <string>
#include <vector>

namespace sparselab {

/// Whole-file read/write; failures raise InvalidInput naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// {"format": "sparse-collection", "grid": {"dim", "depth"}, "cubes": ["l:k1,...", ...]}
std::string sparse_to_json(const SparseCollection& s);
SparseCollection sparse_from_json(const std::string& text, std::size_t max_cubes = kDefaultMaxCubes);

/// {"format": "matrix-weight", "grid", "n", "kind", "seed", "values": [[n*n row-major], ...]}
std::string weight_to_json(const MatrixWeight& w);
MatrixWeight weight_from_json(const std::string& text, std::uint64_t size_cap = kDefaultSizeCap);

/// Same layout as weights with "format": "matrix-symbol" and "psd": false.
std::string symbol_to_json(const SymbolFn& b);
SymbolFn symbol_from_json(const std::string& text, std::uint64_t size_cap = kDefaultSizeCap);

/// {"0": [cubes of J^0], "1": [...], ...}
std::string decomposition_to_json(const Decomposition& dec);

/// {"norm", "residual", "iterations", "method"}
std::string norm_report_to_json(const NormReport& r);

/// FNV-1a 64-bit digest of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

} // namespace sparselab
