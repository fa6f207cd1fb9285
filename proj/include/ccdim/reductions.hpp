#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccdim/concept_class.hpp"
#include "ccdim/dimensions.hpp"
#include "ccdim/label_cover.hpp"

namespace ccdim {

enum class ReductionMode { vc, ls };

struct ReductionCaps {
    std::uint64_t max_universe = 100000;
    std::uint64_t max_concepts = 100000;
    std::uint32_t max_rk = 16;
    std::int64_t max_ell = 64;
    std::int64_t max_k = 8;
    std::uint64_t max_matrix_bits = std::uint64_t{1} << 28;
    std::uint32_t partition_retries = 100;
};

struct ReductionParams {
    std::uint32_t r = 0;  // 0 = floor(sqrt(n)/log2 n), clamped to >= 2
    double delta = 0.1;   // gap parameter; drives the default matching count
    std::int64_t ell = 0; // 0 = default (ceil(80/delta^3) resp. 1000), clamped
    std::int64_t k = 0;   // copies; 0 = formula default, clamped (ls only)
    std::uint64_t seed = 0;
    ReductionCaps caps;
};

// How each effective parameter was obtained, for reproducibility records.
struct ParamRecord {
    std::string name;
    std::string formula_value; // value the unclamped default formula yields
    std::int64_t used = 0;
    bool clamped = false;
};

// Matchings and derived test sets for one seed set.
struct SeedPlan {
    std::uint64_t id = 0; // subset mask over blocks (bit i = block i)
    std::vector<std::vector<std::uint32_t>> perms;          // ell permutations of the blocks
    std::vector<std::vector<std::uint32_t>> matched;        // per block: partner blocks, ascending
    std::vector<std::vector<std::uint32_t>> tested_in_block; // per block: tested vertices (global ids)
    std::vector<std::uint32_t> test_vertices;               // union, ascending
};

struct TestPlan {
    std::uint32_t r_eff = 0;
    std::vector<SeedPlan> seeds; // indexed by mask, 2^r_eff entries
};

struct ElementKind {
    bool is_assignment = false;
    std::uint32_t block = 0;          // i, 0-based
    std::int64_t copy = -1;           // j, 0-based; -1 when the construction has no copies
    std::string sigma;                // digits over the block's vertices (assignment elements)
    std::uint64_t inclusion_mask = 0; // I for copied test-selection elements
};

struct ConceptMeta {
    std::uint64_t i_mask = 0;
    std::uint64_t h_mask = 0;
    std::string sigma;
};

struct ReductionOutput {
    ReductionMode mode = ReductionMode::vc;
    ConceptClass cls;
    LabelCoverInstance instance;
    BlockPartition partition;
    TestPlan plan;
    std::uint32_t r = 0;     // requested block count
    std::uint32_t r_eff = 0; // including the parity pad block
    bool padded = false;
    std::int64_t ell = 0;
    std::int64_t k = 1;
    double delta = 0.0;
    std::uint64_t seed = 0;
    ReductionCaps caps;
    std::vector<ParamRecord> param_records;
    std::vector<ElementKind> element_kinds; // aligned with universe positions
    std::vector<ConceptMeta> concept_meta;  // aligned with concept rows
};

// Element/concept label grammar (documented in the README):
//   assignment element   x:<i>:<digits>[:<j>]
//   test selection       y:<i>[:<I-mask>:<j>]
//   concept              c:<I-mask>:<H-mask>:<digits>
// i and j are 1-based, masks are decimal, digits use 0-9a-z per symbol.
char symbol_digit(std::uint32_t symbol);
std::uint32_t digit_symbol(char c);

ReductionOutput vc_reduction(const LabelCoverInstance& inst, const ReductionParams& params);
ReductionOutput ls_reduction(const LabelCoverInstance& inst, const ReductionParams& params);

// Blocks with at least half of their copies present in the mask.
std::uint64_t threshold_projection(std::uint64_t h_mask, std::uint32_t r, std::uint32_t k);

// The size-2r element set that a satisfying assignment shatters.
std::vector<std::size_t> vc_completeness_certificate(const ReductionOutput& out,
                                                     const PartialAssignment& sigma_star);

// The depth-2rk mistake tree a satisfying assignment yields.
MistakeTree ls_completeness_tree(const ReductionOutput& out, const PartialAssignment& sigma_star);

// All assignments over `vertices` (ascending global ids) violating no edge
// whose endpoints both lie inside; lexicographic order of digit strings.
std::vector<std::string> enumerate_consistent_assignments(const LabelCoverInstance& inst,
                                                          const std::vector<std::uint32_t>& vertices,
                                                          std::uint64_t cap);

} // namespace ccdim
