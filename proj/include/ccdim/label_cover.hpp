#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccdim/errors.hpp"
#include "ccdim/rng.hpp"

namespace ccdim {

// Projection-constrained edge of a bipartite constraint graph. Parallel
// edges with different projections are allowed.
struct LabelCoverEdge {
    std::uint32_t a = 0;                    // index into A
    std::uint32_t b = 0;                    // index into B
    std::vector<std::uint32_t> projection;  // size alphabet_size; A-symbol -> required B-symbol
};

// Global vertex ids enumerate A first, then B.
class LabelCoverInstance {
public:
    static LabelCoverInstance make(std::vector<std::string> a_names,
                                   std::vector<std::string> b_names,
                                   std::uint32_t alphabet_size,
                                   std::vector<LabelCoverEdge> edges);

    std::size_t num_a() const { return a_names_.size(); }
    std::size_t num_b() const { return b_names_.size(); }
    std::size_t num_vertices() const { return a_names_.size() + b_names_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    std::uint32_t alphabet_size() const { return alphabet_size_; }

    std::uint32_t a_vertex(std::uint32_t i) const { return i; }
    std::uint32_t b_vertex(std::uint32_t j) const {
        return static_cast<std::uint32_t>(a_names_.size()) + j;
    }
    bool is_a_vertex(std::uint32_t v) const { return v < a_names_.size(); }

    const std::string& vertex_name(std::uint32_t v) const;
    const std::vector<std::string>& a_names() const { return a_names_; }
    const std::vector<std::string>& b_names() const { return b_names_; }
    const std::vector<LabelCoverEdge>& edges() const { return edges_; }

private:
    std::vector<std::string> a_names_, b_names_;
    std::uint32_t alphabet_size_ = 0;
    std::vector<LabelCoverEdge> edges_;
};

// Symbol per global vertex; kUnassigned marks vertices outside the domain.
class PartialAssignment {
public:
    static constexpr std::int64_t kUnassigned = -1;

    PartialAssignment() = default;
    explicit PartialAssignment(std::size_t n_vertices) : values_(n_vertices, kUnassigned) {}

    static PartialAssignment make(const LabelCoverInstance& inst,
                                  std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs);

    std::size_t size() const { return values_.size(); }
    bool assigned(std::uint32_t v) const { return values_[v] >= 0; }
    std::uint32_t value(std::uint32_t v) const { return static_cast<std::uint32_t>(values_[v]); }
    void set(std::uint32_t v, std::uint32_t symbol) { values_[v] = symbol; }
    void clear(std::uint32_t v) { values_[v] = kUnassigned; }

    bool total() const {
        for (auto v : values_)
            if (v < 0)
                return false;
        return true;
    }
    std::size_t domain_size() const {
        std::size_t c = 0;
        for (auto v : values_)
            c += v >= 0;
        return c;
    }

private:
    std::vector<std::int64_t> values_;
};

struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    double to_double() const { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }
};

// Fraction of satisfied edges; requires a total assignment.
Fraction value(const LabelCoverInstance& inst, const PartialAssignment& phi);

struct OptimumBudget {
    // Assignment-space precondition log2(|alphabet|^(|A|+|B|)) <= log2_space;
    // 0 disables the check (the work guard below still applies).
    double log2_space = 40.0;
    // Hard guard on enumeration work, |alphabet|^|A| * (|E| + |B|).
    std::uint64_t max_work = std::uint64_t{1} << 33;
};

struct OptimumResult {
    Fraction val;
    PartialAssignment assignment;
    std::uint64_t enumerated = 0;
    bool satisfiable() const { return val.num == val.den || val.den == 0; }
};

// Exact optimum. Enumerates A-side assignments; for each, the best B-side
// labels decompose per vertex since constraints are projections into B.
OptimumResult brute_force_optimum(const LabelCoverInstance& inst, const OptimumBudget& budget = {});

// True iff no edge with both endpoints inside `test_vertices` and both
// endpoints assigned is violated. phi may be partial.
bool passes_test(const LabelCoverInstance& inst, const PartialAssignment& phi,
                 std::span<const std::uint32_t> test_vertices);

struct PartitionQuality {
    std::vector<std::size_t> block_sizes;
    std::vector<std::vector<std::uint64_t>> pair_edges; // [i][j]: A-endpoint in i, B-endpoint in j
    bool sizes_ok = false;
    bool edges_ok = false;
    bool pass = false;
    std::uint32_t violations = 0;
    bool biregular = false;
};

struct BlockPartition {
    std::uint32_t r = 0;
    std::uint64_t seed = 0;
    std::uint32_t attempts = 0;       // samples drawn
    std::uint32_t chosen_attempt = 0; // index of the returned sample
    std::vector<std::uint32_t> block_of;                        // per global vertex
    std::vector<std::vector<std::uint32_t>> blocks;             // ascending vertex ids
    std::vector<std::vector<std::vector<std::uint32_t>>> neighbors_into; // [i][j] = vertices of block i with a neighbor in block j
    PartitionQuality quality;
};

// Uniform random balanced partition, re-sampled until the size and pair-edge
// bounds hold or the retry cap is hit; the best attempt (fewest violated
// bounds) is returned with honest quality flags either way.
BlockPartition partition_blocks(const LabelCoverInstance& inst, std::uint32_t r,
                                std::uint64_t seed, std::uint32_t retry_cap = 100);

} // namespace ccdim
