#include "ccdim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ccdim/dimensions.hpp"
#include "ccdim/rng.hpp"

namespace ccdim {

namespace {

constexpr std::uint64_t kTagTrial = 3;
constexpr std::uint64_t kTagSample = 4;
constexpr std::uint64_t kTagBipartition = 5;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

Decomposition non_repetitive_decompose(const ReductionOutput& out,
                                       std::span<const std::size_t> set) {
    for (std::size_t pos : set)
        out.cls.check_position(pos);
    const bool copied = out.mode == ReductionMode::ls;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> lowest;
    for (std::size_t pos : set) {
        const ElementKind& kind = out.element_kinds[pos];
        if (!kind.is_assignment)
            continue;
        const std::pair<std::uint32_t, std::uint32_t> key{
            kind.block, copied ? static_cast<std::uint32_t>(kind.copy) : 0u};
        auto [it, inserted] = lowest.emplace(key, pos);
        if (!inserted && pos < it->second)
            it->second = pos;
    }
    Decomposition d;
    std::uint64_t block_mask = 0;
    for (const auto& [key, pos] : lowest) {
        d.non_repetitive.push_back(pos);
        block_mask |= std::uint64_t{1} << key.first;
        if (copied)
            d.copies_present.push_back(key);
    }
    std::sort(d.non_repetitive.begin(), d.non_repetitive.end());
    for (std::uint32_t i = 0; i < out.r_eff; ++i)
        if ((block_mask >> i) & 1u)
            d.blocks_present.push_back(i);
    return d;
}

std::vector<std::uint64_t> passed_tests(const ReductionOutput& out,
                                        std::span<const std::size_t> non_repetitive) {
    const bool copied = out.mode == ReductionMode::ls;
    std::vector<std::vector<const ElementKind*>> per_block(out.r_eff);
    std::vector<bool> copy_seen(out.r_eff * std::max<std::size_t>(1, out.k), false);
    for (std::size_t pos : non_repetitive) {
        out.cls.check_position(pos);
        const ElementKind& kind = out.element_kinds[pos];
        if (!kind.is_assignment)
            throw InputError("non-repetitive sets contain assignment elements only");
        const std::size_t slot =
            copied ? kind.block * static_cast<std::size_t>(out.k) + kind.copy : kind.block;
        if (copy_seen[slot])
            throw InputError("set is repetitive: two elements share a block slot");
        copy_seen[slot] = true;
        per_block[kind.block].push_back(&kind);
    }

    std::vector<std::uint64_t> passed;
    for (const SeedPlan& sp : out.plan.seeds) {
        bool ok = true;
        PartialAssignment phi(out.instance.num_vertices());
        for (std::uint32_t i = 0; i < out.r_eff && ok; ++i) {
            if (per_block[i].empty() || i >= out.partition.blocks.size())
                continue;
            const auto& verts = out.partition.blocks[i];
            for (std::uint32_t v : sp.tested_in_block[i]) {
                const auto it = std::lower_bound(verts.begin(), verts.end(), v);
                const std::size_t local = static_cast<std::size_t>(it - verts.begin());
                const std::uint32_t sym = digit_symbol(per_block[i][0]->sigma[local]);
                for (const ElementKind* kind : per_block[i]) {
                    if (digit_symbol(kind->sigma[local]) != sym) {
                        ok = false; // copies disagree on the tested part
                        break;
                    }
                }
                if (!ok)
                    break;
                phi.set(v, sym);
            }
        }
        if (ok && passes_test(out.instance, phi, sp.test_vertices))
            passed.push_back(sp.id);
    }
    return passed;
}

PassEstimate estimate_pass_probability(const LabelCoverInstance& inst,
                                       const BlockPartition& partition,
                                       std::span<const std::uint32_t> blocks,
                                       const PartialAssignment& sigma, std::uint64_t trials,
                                       std::uint64_t seed, double delta, int threads,
                                       const OptimumBudget& optimum_budget) {
    if (trials == 0)
        throw InputError("at least one trial is required");
    if (sigma.size() != inst.num_vertices())
        throw InputError("assignment size does not match the instance");
    const std::uint32_t r = partition.r;
    std::vector<bool> in_blocks(r, false);
    for (std::uint32_t i : blocks) {
        if (i >= r)
            throw InputError("block index out of range");
        in_blocks[i] = true;
    }
    for (std::uint32_t v = 0; v < sigma.size(); ++v)
        if (sigma.assigned(v) && !in_blocks[partition.block_of[v]])
            throw InputError("assignment labels a vertex outside the selected blocks");

    const std::uint32_t r_eff = r + (r % 2);
    const std::size_t n = inst.num_vertices();

    int t_threads = threads;
#ifdef _OPENMP
    if (t_threads <= 0)
        t_threads = omp_get_max_threads();
#else
    t_threads = 1;
#endif
    std::uint64_t passes = 0;
    const std::int64_t t_count = static_cast<std::int64_t>(trials);
#ifdef _OPENMP
    #pragma omp parallel for schedule(static) reduction(+ : passes) num_threads(t_threads) if (t_threads > 1)
#endif
    for (std::int64_t t = 0; t < t_count; ++t) {
        Rng rng(derive_stream(seed, kTagTrial, static_cast<std::uint64_t>(t)));
        const auto perm = rng.permutation(r_eff);
        std::vector<bool> tested(n, false);
        for (std::uint32_t p = 0; p + 1 < r_eff; p += 2) {
            const std::uint32_t i = perm[p], j = perm[p + 1];
            if (i < r && j < r) {
                for (std::uint32_t v : partition.neighbors_into[i][j])
                    tested[v] = true;
                for (std::uint32_t v : partition.neighbors_into[j][i])
                    tested[v] = true;
            }
        }
        bool ok = true;
        for (const auto& e : inst.edges()) {
            const std::uint32_t va = inst.a_vertex(e.a);
            const std::uint32_t vb = inst.b_vertex(e.b);
            if (!tested[va] || !tested[vb] || !sigma.assigned(va) || !sigma.assigned(vb))
                continue;
            if (e.projection[sigma.value(va)] != sigma.value(vb)) {
                ok = false;
                break;
            }
        }
        passes += ok ? 1 : 0;
    }

    PassEstimate est;
    est.trials = trials;
    est.passes = passes;
    est.estimate = static_cast<double>(passes) / static_cast<double>(trials);
    est.std_error = std::sqrt(std::max(0.0, est.estimate * (1.0 - est.estimate)) /
                              static_cast<double>(trials));

    const double eps = 1e-12;
    est.delta = delta > 0.0 ? delta
                            : static_cast<double>(blocks.size()) / static_cast<double>(r);
    est.bound = std::pow(1.0 - 0.1 * est.delta * est.delta, est.delta * r / 8.0);
    if (static_cast<double>(blocks.size()) + eps < est.delta * r) {
        est.note = "selected blocks fewer than delta*r; bound not applicable";
    } else if (est.delta + eps < 8.0 / r) {
        est.note = "delta below 8/r; bound not applicable";
    } else {
        try {
            const OptimumResult opt = brute_force_optimum(inst, optimum_budget);
            const double val = opt.val.to_double();
            if (val <= est.delta * est.delta / 100.0 + eps) {
                est.bound_applicable = true;
                est.note = "optimum value " + fmt(val) + " certified <= delta^2/100";
            } else {
                est.note = "optimum value " + fmt(val) + " exceeds delta^2/100; bound not applicable";
            }
        } catch (const ResourceError& e) {
            est.note = std::string("optimum not certified: ") + e.what();
        }
    }
    return est;
}

namespace {

struct SearchContext {
    const ReductionOutput& out;
    std::vector<const BitRow*> rows; // distinct representative rows
    const std::vector<std::uint32_t>& representative;
    std::vector<std::size_t> order; // elements by decreasing trace contribution
    std::uint64_t budget;
    SearchOutcome result;

    explicit SearchContext(const ReductionOutput& o, std::uint64_t b)
        : out(o), representative(o.cls.dedup().representative), budget(b) {
        for (std::uint32_t r : representative)
            rows.push_back(&o.cls.row(r));
        const std::size_t n = o.cls.num_elements();
        std::vector<std::size_t> ones(n, 0);
        for (const BitRow* r : rows)
            for (std::size_t x = 0; x < n; ++x)
                ones[x] += r->get(x);
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b2) {
            const std::size_t ca = std::min(ones[a], rows.size() - ones[a]);
            const std::size_t cb = std::min(ones[b2], rows.size() - ones[b2]);
            if (ca != cb)
                return ca > cb;
            return a < b2;
        });
    }

    void check_seed_bound(const std::vector<std::size_t>& set) {
        ++result.sets_checked;
        std::vector<std::size_t> sorted(set);
        std::sort(sorted.begin(), sorted.end());
        const Decomposition d = non_repetitive_decompose(out, sorted);
        const auto passed = passed_tests(out, d.non_repetitive);
        const std::size_t gap = set.size() - d.blocks_present.size();
        const bool ok = gap < 63 && passed.size() >= (std::size_t{1} << gap);
        if (!ok) {
            ++result.seed_bound_violations;
            if (result.violation_details.size() < 16) {
                std::string detail = "set{";
                for (std::size_t p : sorted)
                    detail += std::to_string(p) + ",";
                detail += "} passed=" + std::to_string(passed.size()) +
                          " required=2^" + std::to_string(gap);
                result.violation_details.push_back(std::move(detail));
            }
        }
    }

    void maybe_update_best(const std::vector<std::size_t>& set,
                           const std::vector<std::vector<std::uint32_t>>& groups) {
        std::vector<std::size_t> sorted(set);
        std::sort(sorted.begin(), sorted.end());
        if (!result.best_set.empty() || !result.witness.assignments.empty()) {
            if (sorted.size() < result.best_set.size())
                return;
            if (sorted.size() == result.best_set.size() && !(sorted < result.best_set))
                return;
        }
        // remap subset masks from search order to ascending position order
        std::vector<std::size_t> perm(set.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t a, std::size_t b) { return set[a] < set[b]; });
        ShatterWitness w;
        w.set = sorted;
        w.assignments.assign(std::size_t{1} << set.size(), 0);
        for (std::size_t mask = 0; mask < groups.size(); ++mask) {
            std::size_t remapped = 0;
            for (std::size_t t = 0; t < set.size(); ++t)
                if ((mask >> perm[t]) & 1u)
                    remapped |= std::size_t{1} << t;
            w.assignments[remapped] = representative[groups[mask][0]];
        }
        result.best_set = std::move(sorted);
        result.witness = std::move(w);
    }

    bool extend(const std::vector<std::vector<std::uint32_t>>& groups, std::size_t x,
                std::vector<std::vector<std::uint32_t>>& out_groups) const {
        out_groups.assign(groups.size() * 2, {});
        for (std::size_t m = 0; m < groups.size(); ++m) {
            auto& g0 = out_groups[m];
            auto& g1 = out_groups[m + groups.size()];
            for (std::uint32_t id : groups[m])
                (rows[id]->get(x) ? g1 : g0).push_back(id);
            if (g0.empty() || g1.empty())
                return false;
        }
        return true;
    }

    // returns false once the budget is exhausted
    bool dfs(std::vector<std::size_t>& set, std::size_t next_rank,
             const std::vector<std::vector<std::uint32_t>>& groups) {
        ++result.explored;
        check_seed_bound(set);
        maybe_update_best(set, groups);
        if ((std::size_t{1} << (set.size() + 1)) > rows.size())
            return true; // no superset can stay shattered
        std::vector<std::vector<std::uint32_t>> child;
        for (std::size_t rank = next_rank; rank < order.size(); ++rank) {
            if (result.explored >= budget) {
                result.budget_exhausted = true;
                return false;
            }
            if (!extend(groups, order[rank], child))
                continue;
            set.push_back(order[rank]);
            const bool keep_going = dfs(set, rank + 1, child);
            set.pop_back();
            if (!keep_going)
                return false;
        }
        return true;
    }
};

} // namespace

SearchOutcome shattered_search(const ReductionOutput& out, std::uint64_t budget) {
    if (budget == 0)
        throw InputError("search budget must be positive");
    SearchContext ctx(out, budget);
    if (out.cls.empty())
        return std::move(ctx.result);
    std::vector<std::uint32_t> all(out.cls.dedup().distinct);
    std::iota(all.begin(), all.end(), 0u);
    std::vector<std::size_t> set;
    ctx.dfs(set, 0, {all});
    return std::move(ctx.result);
}

ObservationAudit audit_concept_memberships(const ReductionOutput& out, std::uint64_t samples,
                                           std::uint64_t seed) {
    ObservationAudit audit;
    if (out.cls.empty())
        return audit;
    const bool copied = out.mode == ReductionMode::ls;
    for (std::uint64_t s = 0; s < samples; ++s) {
        Rng rng(derive_stream(seed, kTagSample, s));
        const std::size_t c = static_cast<std::size_t>(rng.below(out.cls.num_concepts()));

        std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> groups;
        for (std::size_t pos = 0; pos < out.cls.num_elements(); ++pos) {
            const ElementKind& kind = out.element_kinds[pos];
            if (!kind.is_assignment || !out.cls.member(c, pos))
                continue;
            groups[{kind.block, copied ? static_cast<std::uint32_t>(kind.copy) : 0u}].push_back(pos);
        }
        std::vector<std::size_t> subset;
        for (const auto& [key, members] : groups)
            if (rng.coin())
                subset.push_back(members[rng.below(members.size())]);

        const auto passed = passed_tests(out, subset);
        const std::uint64_t expected =
            copied ? threshold_projection(out.concept_meta[c].h_mask, out.r_eff,
                                          static_cast<std::uint32_t>(out.k))
                   : out.concept_meta[c].h_mask;
        ++audit.samples;
        if (!std::binary_search(passed.begin(), passed.end(), expected)) {
            ++audit.violations;
            if (audit.details.size() < 16)
                audit.details.push_back("concept " + out.cls.concept_labels()[c] +
                                        " seed " + std::to_string(expected) +
                                        " not passed by a sampled subset");
        }
    }
    return audit;
}

HalfAgreement half_agreement_audit(std::uint64_t candidate_mask,
                                   std::span<const std::uint64_t> seed_masks, std::uint32_t r) {
    if (r == 0 || r > 63)
        throw InputError("seed mask width must be in 1..63");
    HalfAgreement h;
    const std::uint64_t width = (std::uint64_t{1} << r) - 1;
    for (std::uint64_t m : seed_masks) {
        const auto diff =
            static_cast<std::size_t>(std::popcount((candidate_mask ^ m) & width));
        if (diff > h.worst_diff) {
            h.worst_diff = diff;
            h.worst_seed = m;
        }
    }
    h.bound = 0.5 * r + 1000.0 * std::sqrt(static_cast<double>(r)) *
                            std::log2(static_cast<double>(seed_masks.size()) + 1.0);
    h.within = static_cast<double>(h.worst_diff) <= h.bound;
    return h;
}

AuditReport check_dimension_facts(const ConceptClass& cls, const FactsOptions& opts) {
    AuditReport report;
    report.name = "dimension_facts";
    report.params = {{"seed", std::to_string(opts.seed)},
                     {"bipartitions", std::to_string(opts.bipartitions)},
                     {"node_budget", std::to_string(opts.node_budget)},
                     {"elements", std::to_string(cls.num_elements())},
                     {"concepts", std::to_string(cls.num_concepts())},
                     {"distinct", std::to_string(cls.dedup().distinct)}};

    if (cls.empty()) {
        report.checks.push_back({"vc_le_ls_le_log", "skipped", "", "", "empty class: dimensions undefined"});
        return report;
    }

    DimOptions dim_opts;
    dim_opts.threads = opts.threads;
    dim_opts.node_budget = opts.node_budget;

    int vc = 0, ls = 0;
    try {
        const VcResult vcr = vc_dimension(cls, dim_opts);
        const LsResult lsr = ls_dimension(cls, dim_opts);
        vc = vcr.dimension;
        ls = lsr.dimension;
        const int log_cap = floor_log2(cls.dedup().distinct);
        const bool ok = vc <= ls && ls <= log_cap;
        report.checks.push_back({"vc_le_ls_le_log", ok ? "pass" : "fail",
                                 "vc=" + std::to_string(vc) + " ls=" + std::to_string(ls),
                                 "vc <= ls <= " + std::to_string(log_cap), ""});
    } catch (const ResourceError& e) {
        report.checks.push_back({"vc_le_ls_le_log", "skipped", "", "", e.what()});
        return report;
    }

    try {
        int worst_margin = std::numeric_limits<int>::max();
        std::string detail;
        bool ok = true;
        for (std::uint32_t t = 0; t < opts.bipartitions; ++t) {
            Rng rng(derive_stream(opts.seed, kTagBipartition, t));
            std::vector<std::size_t> u1, u2;
            for (std::size_t x = 0; x < cls.num_elements(); ++x)
                (rng.coin() ? u1 : u2).push_back(x);
            const int ls1 = ls_dimension_on(cls, u1, dim_opts).dimension;
            const int ls2 = ls_dimension_on(cls, u2, dim_opts).dimension;
            const int margin = ls1 + ls2 - ls;
            worst_margin = std::min(worst_margin, margin);
            if (margin < 0 && ok) {
                ok = false;
                detail = "split " + std::to_string(t) + ": " + std::to_string(ls1) + "+" +
                         std::to_string(ls2) + " < " + std::to_string(ls);
            }
        }
        if (opts.bipartitions > 0)
            report.checks.push_back({"union_subadditivity", ok ? "pass" : "fail",
                                     "worst ls1+ls2-ls = " + std::to_string(worst_margin),
                                     ">= 0", detail});
    } catch (const ResourceError& e) {
        report.checks.push_back({"union_subadditivity", "skipped", "", "", e.what()});
    }
    return report;
}

} // namespace ccdim
