#pragma once

#include "sparselab/commutators.hpp"
#include "sparselab/matrix_weight.hpp"
#include "sparselab/sparse_collection.hpp"

#include <string>
#include <vector>

namespace sparselab {

/// One (S, W) instance of a corpus.
struct InstanceSpec {
    int dim = 1;
    int depth = 6;
    int n = 1;
    SparseParams sparse;
    WeightParams weight;
};

/// One (S, B) instance for the commutator checks.
struct SymbolInstanceSpec {
    int dim = 1;
    int depth = 6;
    int n = 1;
    SparseParams sparse;
    SymbolParams symbol;
};

struct Corpus {
    std::string name;
    std::vector<InstanceSpec> instances;
    std::vector<SymbolInstanceSpec> symbols;
};

/// Expands a "corpus-spec" document: the product grids x sparse x weights x n
/// (rotating2d is skipped for odd n), and likewise for symbols.
Corpus corpus_from_json(const std::string& text);

/// The builtin standard corpus; identical to corpus/standard.json.
const std::string& standard_corpus_json();
Corpus standard_corpus();

/// "standard" or a path to a corpus-spec file.
Corpus load_corpus(const std::string& name_or_path);

/// Human-readable reproduction digest, e.g.
/// "d=1 L=6 n=2 sparse=random(seed=1) weight=power(alpha=0.3)".
std::string describe(const InstanceSpec& spec);
std::string describe(const SymbolInstanceSpec& spec);

SparseCollection build_sparse(const InstanceSpec& spec);
MatrixWeight build_weight(const InstanceSpec& spec);
SparseCollection build_sparse(const SymbolInstanceSpec& spec);
SymbolFn build_symbol(const SymbolInstanceSpec& spec);

/// Parameter objects from JSON text fragments ({"kind": ..., ...}); unknown
/// keys are rejected with the key name.
SparseParams sparse_params_from_json(const std::string& text);
WeightParams weight_params_from_json(const std::string& text);
SymbolParams symbol_params_from_json(const std::string& text);

} // namespace sparselab
