#include "ccdim/label_cover.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ccdim {

LabelCoverInstance LabelCoverInstance::make(std::vector<std::string> a_names,
                                            std::vector<std::string> b_names,
                                            std::uint32_t alphabet_size,
                                            std::vector<LabelCoverEdge> edges) {
    if (alphabet_size == 0)
        throw InputError("alphabet size must be positive");
    std::unordered_set<std::string> seen;
    for (const auto& n : a_names)
        if (!seen.insert(n).second)
            throw InputError("duplicate vertex name: " + n);
    for (const auto& n : b_names)
        if (!seen.insert(n).second)
            throw InputError("duplicate vertex name: " + n);
    for (const auto& e : edges) {
        if (e.a >= a_names.size() || e.b >= b_names.size())
            throw InputError("edge references an unknown vertex");
        if (e.projection.size() != alphabet_size)
            throw InputError("projection table must cover the whole alphabet");
        for (std::uint32_t s : e.projection)
            if (s >= alphabet_size)
                throw InputError("projection value outside the alphabet");
    }
    LabelCoverInstance inst;
    inst.a_names_ = std::move(a_names);
    inst.b_names_ = std::move(b_names);
    inst.alphabet_size_ = alphabet_size;
    inst.edges_ = std::move(edges);
    return inst;
}

const std::string& LabelCoverInstance::vertex_name(std::uint32_t v) const {
    if (v < a_names_.size())
        return a_names_[v];
    return b_names_[v - a_names_.size()];
}

PartialAssignment PartialAssignment::make(
    const LabelCoverInstance& inst,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs) {
    PartialAssignment phi(inst.num_vertices());
    for (const auto& [v, s] : pairs) {
        if (v >= inst.num_vertices())
            throw InputError("assignment vertex out of range");
        if (s >= inst.alphabet_size())
            throw InputError("assignment symbol outside the alphabet");
        if (phi.assigned(v))
            throw InputError("assignment lists a vertex twice");
        phi.set(v, s);
    }
    return phi;
}

Fraction value(const LabelCoverInstance& inst, const PartialAssignment& phi) {
    if (phi.size() != inst.num_vertices())
        throw InputError("assignment size does not match the instance");
    if (!phi.total())
        throw InputError("value requires a total assignment; use passes_test for partial ones");
    std::uint64_t sat = 0;
    for (const auto& e : inst.edges()) {
        const std::uint32_t va = inst.a_vertex(e.a);
        const std::uint32_t vb = inst.b_vertex(e.b);
        if (e.projection[phi.value(va)] == phi.value(vb))
            ++sat;
    }
    return Fraction{sat, std::max<std::uint64_t>(1, inst.num_edges())};
}

OptimumResult brute_force_optimum(const LabelCoverInstance& inst, const OptimumBudget& budget) {
    const double sigma = inst.alphabet_size();
    const double log2_space =
        static_cast<double>(inst.num_vertices()) * std::log2(sigma);
    if (budget.log2_space > 0 && log2_space > budget.log2_space)
        throw ResourceError("assignment space 2^" + std::to_string(log2_space) +
                            " exceeds the configured budget 2^" +
                            std::to_string(budget.log2_space));
    const double work = std::pow(sigma, static_cast<double>(inst.num_a())) *
                        static_cast<double>(inst.num_edges() + inst.num_b() + 1);
    if (work > static_cast<double>(budget.max_work))
        throw ResourceError("optimum enumeration needs about " + std::to_string(work) +
                            " steps, above the work cap of " +
                            std::to_string(budget.max_work));

    const std::uint32_t sig = inst.alphabet_size();
    const std::size_t na = inst.num_a();
    const std::size_t nb = inst.num_b();

    OptimumResult best;
    best.val = Fraction{0, std::max<std::uint64_t>(1, inst.num_edges())};
    best.assignment = PartialAssignment(inst.num_vertices());

    std::vector<std::uint32_t> phi_a(na, 0);
    std::vector<std::uint32_t> counts(nb * sig, 0);
    std::vector<std::size_t> touched;
    touched.reserve(inst.num_edges());

    bool have_best = false;
    std::uint64_t enumerated = 0;
    while (true) {
        ++enumerated;
        touched.clear();
        for (const auto& e : inst.edges()) {
            const std::size_t slot = static_cast<std::size_t>(e.b) * sig + e.projection[phi_a[e.a]];
            if (counts[slot]++ == 0)
                touched.push_back(slot);
        }
        std::uint64_t sat = 0;
        std::vector<std::uint32_t> phi_b(nb, 0);
        for (std::size_t b = 0; b < nb; ++b) {
            std::uint32_t best_sym = 0, best_cnt = 0;
            for (std::uint32_t s = 0; s < sig; ++s) {
                const std::uint32_t c = counts[b * sig + s];
                if (c > best_cnt) {
                    best_cnt = c;
                    best_sym = s;
                }
            }
            phi_b[b] = best_sym;
            sat += best_cnt;
        }
        for (std::size_t slot : touched)
            counts[slot] = 0;

        if (!have_best || sat > best.val.num) {
            have_best = true;
            best.val.num = sat;
            for (std::size_t i = 0; i < na; ++i)
                best.assignment.set(inst.a_vertex(static_cast<std::uint32_t>(i)), phi_a[i]);
            for (std::size_t b = 0; b < nb; ++b)
                best.assignment.set(inst.b_vertex(static_cast<std::uint32_t>(b)), phi_b[b]);
            if (best.val.num == best.val.den)
                break; // cannot improve on a satisfying assignment
        }

        // odometer, first A vertex most significant
        std::size_t pos = na;
        while (pos > 0) {
            if (++phi_a[pos - 1] < sig)
                break;
            phi_a[pos - 1] = 0;
            --pos;
        }
        if (pos == 0)
            break;
    }
    best.enumerated = enumerated;
    return best;
}

bool passes_test(const LabelCoverInstance& inst, const PartialAssignment& phi,
                 std::span<const std::uint32_t> test_vertices) {
    if (phi.size() != inst.num_vertices())
        throw InputError("assignment size does not match the instance");
    std::vector<bool> in_test(inst.num_vertices(), false);
    for (std::uint32_t v : test_vertices) {
        if (v >= inst.num_vertices())
            throw InputError("test vertex out of range");
        in_test[v] = true;
    }
    for (const auto& e : inst.edges()) {
        const std::uint32_t va = inst.a_vertex(e.a);
        const std::uint32_t vb = inst.b_vertex(e.b);
        if (!in_test[va] || !in_test[vb])
            continue;
        if (!phi.assigned(va) || !phi.assigned(vb))
            continue;
        if (e.projection[phi.value(va)] != phi.value(vb))
            return false;
    }
    return true;
}

namespace {

PartitionQuality assess(const LabelCoverInstance& inst,
                        const std::vector<std::uint32_t>& block_of, std::uint32_t r) {
    PartitionQuality q;
    const std::uint64_t n = inst.num_vertices();
    const std::uint64_t m = inst.num_edges();
    q.block_sizes.assign(r, 0);
    for (std::uint32_t b : block_of)
        ++q.block_sizes[b];
    q.pair_edges.assign(r, std::vector<std::uint64_t>(r, 0));
    for (const auto& e : inst.edges())
        ++q.pair_edges[block_of[inst.a_vertex(e.a)]][block_of[inst.b_vertex(e.b)]];

    q.sizes_ok = true;
    for (std::uint32_t i = 0; i < r; ++i) {
        const std::uint64_t s = q.block_sizes[i];
        if (2 * static_cast<std::uint64_t>(r) * s < n || static_cast<std::uint64_t>(r) * s > 2 * n) {
            q.sizes_ok = false;
            ++q.violations;
        }
    }
    q.edges_ok = true;
    const std::uint64_t r2 = static_cast<std::uint64_t>(r) * r;
    for (std::uint32_t i = 0; i < r; ++i)
        for (std::uint32_t j = 0; j < r; ++j) {
            if (i == j)
                continue;
            const std::uint64_t c = q.pair_edges[i][j];
            if (2 * r2 * c < m || r2 * c > 2 * m) {
                q.edges_ok = false;
                ++q.violations;
            }
        }
    q.pass = q.sizes_ok && q.edges_ok;

    std::vector<std::uint64_t> deg_a(inst.num_a(), 0), deg_b(inst.num_b(), 0);
    for (const auto& e : inst.edges()) {
        ++deg_a[e.a];
        ++deg_b[e.b];
    }
    auto all_equal = [](const std::vector<std::uint64_t>& d) {
        for (std::size_t i = 1; i < d.size(); ++i)
            if (d[i] != d[0])
                return false;
        return true;
    };
    q.biregular = all_equal(deg_a) && all_equal(deg_b);
    return q;
}

} // namespace

BlockPartition partition_blocks(const LabelCoverInstance& inst, std::uint32_t r,
                                std::uint64_t seed, std::uint32_t retry_cap) {
    if (r < 1 || r > inst.num_vertices())
        throw InputError("block count must satisfy 1 <= r <= |A|+|B|");
    if (r > 1024)
        throw ResourceError("block count " + std::to_string(r) +
                            " is above the supported maximum of 1024");
    const std::size_t n = inst.num_vertices();

    BlockPartition best;
    bool have_best = false;
    std::uint32_t attempt = 0;
    const std::uint32_t attempts_max = std::max<std::uint32_t>(1, retry_cap);
    for (; attempt < attempts_max; ++attempt) {
        Rng rng(derive_stream(seed, /*tag=*/0x706172u, attempt)); // partition stream
        std::vector<std::uint32_t> block_of(n);
        for (std::size_t v = 0; v < n; ++v)
            block_of[v] = static_cast<std::uint32_t>(rng.below(r));
        PartitionQuality q = assess(inst, block_of, r);
        if (!have_best || q.violations < best.quality.violations) {
            have_best = true;
            best.block_of = std::move(block_of);
            best.quality = std::move(q);
            best.chosen_attempt = attempt;
        }
        if (best.quality.pass)
            break;
    }

    best.r = r;
    best.seed = seed;
    best.attempts = std::min(attempt + 1, attempts_max);
    best.blocks.assign(r, {});
    for (std::uint32_t v = 0; v < n; ++v)
        best.blocks[best.block_of[v]].push_back(v);

    best.neighbors_into.assign(r, std::vector<std::vector<std::uint32_t>>(r));
    for (const auto& e : inst.edges()) {
        const std::uint32_t va = inst.a_vertex(e.a);
        const std::uint32_t vb = inst.b_vertex(e.b);
        const std::uint32_t ia = best.block_of[va];
        const std::uint32_t ib = best.block_of[vb];
        if (ia == ib)
            continue;
        best.neighbors_into[ia][ib].push_back(va);
        best.neighbors_into[ib][ia].push_back(vb);
    }
    for (auto& row : best.neighbors_into)
        for (auto& cell : row) {
            std::sort(cell.begin(), cell.end());
            cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
        }
    return best;
}

} // namespace ccdim
