#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ccdim/concept_class.hpp"

namespace ccdim {

// Full binary tree of depth `depth`; node_elements holds the element of every
// internal node, leaf_witnesses a consistent concept per leaf. Paths are read
// root-first: leaf index = path bits MSB-first, and taking bit 1 at a node
// means the element belongs to the concept.
struct MistakeTree {
    int depth = 0;
    std::vector<std::size_t> node_elements;    // size 2^depth - 1
    std::vector<std::uint32_t> leaf_witnesses; // size 2^depth

    static std::size_t node_slot(int level, std::uint64_t prefix_bits) {
        return ((std::size_t{1} << level) - 1) + static_cast<std::size_t>(prefix_bits);
    }
};

// Throws InputError if the tree is not structurally full or indices are out
// of range; returns whether every leaf witness agrees with its path.
bool verify_mistake_tree(const ConceptClass& cls, const MistakeTree& tree);

struct GameStep {
    std::size_t element;
    bool prediction;
    bool answer;
};

struct GameTranscript {
    std::vector<GameStep> steps;
    std::size_t mistakes = 0;
};

struct DimOptions {
    int threads = 1;               // 1 = serial reference path, 0 = all hardware threads
    std::uint64_t node_budget = 0; // 0 = unlimited; ResourceError when exceeded
};

struct VcResult {
    bool defined = false; // false only for the empty class
    int dimension = -1;
    ShatterWitness witness;
    std::uint64_t explored = 0; // shattered sets visited by the scan
};

struct LsStats {
    std::uint64_t nodes = 0; // recursion invocations
};

struct LsResult {
    bool defined = false;
    int dimension = -1;
    MistakeTree tree;
    std::uint64_t nodes = 0;
};

// Total witness iff |trace(cls, S)| = 2^|S|.
std::optional<ShatterWitness> is_shattered(const ConceptClass& cls,
                                           std::span<const std::size_t> positions);

VcResult vc_dimension(const ConceptClass& cls, const DimOptions& opts = {});

// Decides whether no mistake tree of depth d+1 exists. Monotone in d.
bool ls_at_most(const ConceptClass& cls, int d, const DimOptions& opts = {},
                LsStats* stats = nullptr);

LsResult ls_dimension(const ConceptClass& cls, const DimOptions& opts = {});

// Littlestone's dimension when only `allowed` elements may label tree nodes.
LsResult ls_dimension_on(const ConceptClass& cls, std::span<const std::size_t> allowed,
                         const DimOptions& opts = {});

// The bit whose restriction of the version space has the larger dimension;
// ties predict 1. Throws InputError on an empty version space.
bool soa_predict(const ConceptClass& version_space, std::size_t element,
                 const DimOptions& opts = {});

struct GameConfig {
    std::optional<std::uint32_t> target; // index into the class
    bool adversary = false;
    std::vector<std::size_t> order; // target mode presentation order; empty = ascending
    std::size_t max_steps = std::numeric_limits<std::size_t>::max();
    int threads = 1;
};

// Replacement prediction strategy; receives the representative concept
// indices of the current version space and the queried element.
using Learner = std::function<bool(std::span<const std::uint32_t>, std::size_t)>;

GameTranscript run_online_game(const ConceptClass& cls, const GameConfig& cfg,
                               const Learner& learner = {});

// Reusable solver that keeps its recursion cache across queries, so batches
// of games or predictions over one class do not recompute subproblems.
class LsEngine {
public:
    explicit LsEngine(const ConceptClass& cls, std::vector<std::size_t> allowed = {},
                      const DimOptions& opts = {});
    ~LsEngine();
    LsEngine(LsEngine&&) noexcept;
    LsEngine& operator=(LsEngine&&) noexcept;

    bool at_most(int d);
    LsResult dimension();
    GameTranscript play(const GameConfig& cfg, const Learner& learner = {});
    std::uint64_t nodes() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

inline int floor_log2(std::uint64_t n) {
    int d = -1;
    while (n) {
        n >>= 1;
        ++d;
    }
    return d;
}

} // namespace ccdim
