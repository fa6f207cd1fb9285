#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccdim/label_cover.hpp"
#include "ccdim/reductions.hpp"

namespace ccdim {

struct CheckResult {
    std::string name;
    std::string status; // pass | fail | skipped
    std::string observed;
    std::string expected;
    std::string details;
};

struct AuditReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params; // echoed configuration
    std::vector<CheckResult> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (c.status == "fail")
                return false;
        return true;
    }
};

struct FactsOptions {
    std::uint64_t seed = 0;
    std::uint32_t bipartitions = 20;
    std::uint64_t node_budget = 20'000'000; // per dimension computation; 0 = unlimited
    int threads = 1;
};

// vc <= ls <= log2(#distinct), plus subadditivity of the online dimension
// over sampled universe bipartitions.
AuditReport check_dimension_facts(const ConceptClass& cls, const FactsOptions& opts = {});

struct Decomposition {
    std::vector<std::size_t> non_repetitive; // ascending positions, assignment elements only
    std::vector<std::uint32_t> blocks_present; // ascending block indices with an element in S
    std::vector<std::pair<std::uint32_t, std::uint32_t>> copies_present; // (block, copy), copied mode only
};

// Maximal non-repetitive subset (ties resolved to the lowest position) with
// the index sets it spans.
Decomposition non_repetitive_decompose(const ReductionOutput& out,
                                       std::span<const std::size_t> set);

// Seed sets whose sampled test constraints the decoded partial assignment
// passes; ascending mask order.
std::vector<std::uint64_t> passed_tests(const ReductionOutput& out,
                                        std::span<const std::size_t> non_repetitive);

struct PassEstimate {
    std::uint64_t trials = 0;
    std::uint64_t passes = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double delta = 0.0;
    bool bound_applicable = false;
    double bound = 0.0;
    std::string note;
};

// Empirical probability that `sigma` survives the constraints induced by one
// fresh random matching of the blocks. When the preconditions hold (checked
// against the exact optimum), the analytic bound (1-0.1*delta^2)^(delta*r/8)
// is attached for comparison.
PassEstimate estimate_pass_probability(const LabelCoverInstance& inst,
                                       const BlockPartition& partition,
                                       std::span<const std::uint32_t> blocks,
                                       const PartialAssignment& sigma, std::uint64_t trials,
                                       std::uint64_t seed, double delta = 0.0, int threads = 1,
                                       const OptimumBudget& optimum_budget = {});

struct SearchOutcome {
    std::vector<std::size_t> best_set;
    ShatterWitness witness;
    std::uint64_t explored = 0;
    bool budget_exhausted = false;
    std::uint64_t sets_checked = 0;
    std::uint64_t seed_bound_violations = 0; // |passed| >= 2^(|S|-|I(S)|) failures
    std::vector<std::string> violation_details;
};

// Branch-and-bound search for large shattered sets, elements ordered by
// decreasing trace contribution; every shattered set found is checked against
// the seed-count lower bound via non_repetitive_decompose + passed_tests.
SearchOutcome shattered_search(const ReductionOutput& out, std::uint64_t budget);

struct ObservationAudit {
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;
    std::vector<std::string> details;
};

// Samples (concept, non-repetitive subset) pairs and checks that the
// concept's own seed set is among the subset's passed seeds.
ObservationAudit audit_concept_memberships(const ReductionOutput& out, std::uint64_t samples,
                                           std::uint64_t seed);

struct HalfAgreement {
    std::size_t worst_diff = 0;
    std::uint64_t worst_seed = 0;
    double bound = 0.0;
    bool within = false;
};

// Symmetric differences between a caller-supplied seed mask and a seed
// collection, against the 0.5*r + 1000*sqrt(r)*log2(|H|+1) budget.
HalfAgreement half_agreement_audit(std::uint64_t candidate_mask,
                                   std::span<const std::uint64_t> seed_masks, std::uint32_t r);

} // namespace ccdim
