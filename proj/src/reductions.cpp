#include "ccdim/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "ccdim/rng.hpp"

namespace ccdim {

namespace {

constexpr std::uint64_t kTagPartitionSeed = 1;
constexpr std::uint64_t kTagPlan = 2;

std::uint64_t pow_capped(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (std::uint64_t e = 0; e < exp; ++e) {
        if (base != 0 && v > cap / base)
            return cap + 1;
        v *= base;
        if (v > cap)
            return cap + 1;
    }
    return v;
}

std::string format_count(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
}

struct Resolved {
    std::uint32_t r = 0, r_eff = 0;
    bool padded = false;
    std::int64_t ell = 0;
    std::int64_t k = 1;
    double delta = 0.0;
    std::vector<ParamRecord> records;
};

Resolved resolve_params(const LabelCoverInstance& inst, const ReductionParams& p,
                        ReductionMode mode) {
    if (inst.num_vertices() == 0)
        throw InputError("reduction needs a nonempty constraint graph");
    if (p.delta <= 0.0)
        throw InputError("delta must be positive");

    Resolved rv;
    rv.delta = p.delta;

    const double n = static_cast<double>(inst.num_vertices());
    const double r_raw = n > 1.0 ? std::floor(std::sqrt(n) / std::log2(n)) : 1.0;
    std::uint32_t r_formula = r_raw < 2.0 ? 2 : static_cast<std::uint32_t>(r_raw);
    r_formula = std::min<std::uint32_t>(r_formula, static_cast<std::uint32_t>(inst.num_vertices()));
    if (p.r == 1)
        throw InputError("reductions need at least two blocks");
    rv.r = p.r ? p.r : r_formula;
    rv.records.push_back({"r", format_count(r_raw), static_cast<std::int64_t>(rv.r),
                          static_cast<double>(rv.r) != r_raw});
    rv.padded = (rv.r % 2) != 0;
    rv.r_eff = rv.r + (rv.padded ? 1 : 0);

    if (mode == ReductionMode::vc) {
        const double ell_formula = std::ceil(80.0 / (p.delta * p.delta * p.delta));
        const std::int64_t ell_default =
            std::min<std::int64_t>(p.caps.max_ell,
                                   ell_formula > 1e17 ? std::int64_t{1} << 60
                                                      : static_cast<std::int64_t>(ell_formula));
        rv.ell = p.ell ? p.ell : std::max<std::int64_t>(1, ell_default);
        rv.records.push_back({"ell", format_count(ell_formula), rv.ell,
                              static_cast<double>(rv.ell) != ell_formula});
        rv.k = 1;
    } else {
        rv.ell = p.ell ? p.ell : std::min<std::int64_t>(1000, p.caps.max_ell);
        rv.records.push_back({"ell", "1000", rv.ell, rv.ell != 1000});
        const double k_formula = std::ceil(1e10 * static_cast<double>(inst.num_edges()) *
                                           std::log2(static_cast<double>(inst.alphabet_size())) /
                                           (static_cast<double>(rv.r) * rv.r));
        std::int64_t k_default = p.caps.max_k;
        if (k_formula < static_cast<double>(p.caps.max_k))
            k_default = std::max<std::int64_t>(1, static_cast<std::int64_t>(k_formula));
        rv.k = p.k ? p.k : k_default;
        rv.records.push_back({"k", format_count(k_formula), rv.k,
                              static_cast<double>(rv.k) != k_formula});
    }
    if (rv.ell < 1)
        throw InputError("ell must be at least 1");
    if (rv.ell > p.caps.max_ell)
        throw ResourceError("ell=" + std::to_string(rv.ell) + " exceeds the cap of " +
                            std::to_string(p.caps.max_ell));
    if (rv.k < 1)
        throw InputError("k must be at least 1");
    if (mode == ReductionMode::ls && rv.k > p.caps.max_k)
        throw ResourceError("k=" + std::to_string(rv.k) + " exceeds the cap of " +
                            std::to_string(p.caps.max_k));
    return rv;
}

// Per-block generation tables shared by both constructions.
struct Blocks {
    std::vector<std::vector<std::uint32_t>> vertices;                // r_eff entries
    std::vector<std::vector<std::vector<std::uint32_t>>> neighbors;  // r_eff x r_eff
    std::vector<std::uint64_t> x_per_block;                          // |alphabet|^{|U_i|}
    std::vector<std::vector<std::string>> digits;                    // digit strings, lex order

    static Blocks build(const LabelCoverInstance& inst, const BlockPartition& part,
                        std::uint32_t r_eff, std::uint64_t max_universe) {
        Blocks bl;
        bl.vertices.assign(r_eff, {});
        for (std::uint32_t i = 0; i < part.r; ++i)
            bl.vertices[i] = part.blocks[i];
        bl.neighbors.assign(r_eff, std::vector<std::vector<std::uint32_t>>(r_eff));
        for (std::uint32_t i = 0; i < part.r; ++i)
            for (std::uint32_t j = 0; j < part.r; ++j)
                bl.neighbors[i][j] = part.neighbors_into[i][j];
        bl.x_per_block.assign(r_eff, 1);
        for (std::uint32_t i = 0; i < r_eff; ++i) {
            bl.x_per_block[i] =
                pow_capped(inst.alphabet_size(), bl.vertices[i].size(), max_universe);
            if (bl.x_per_block[i] > max_universe)
                throw ResourceError("block " + std::to_string(i + 1) + " yields more than " +
                                    std::to_string(max_universe) + " assignment elements");
        }
        bl.digits.assign(r_eff, {});
        for (std::uint32_t i = 0; i < r_eff; ++i) {
            const std::size_t len = bl.vertices[i].size();
            std::string cur(len, symbol_digit(0));
            std::vector<std::uint32_t> odo(len, 0);
            for (std::uint64_t m = 0; m < bl.x_per_block[i]; ++m) {
                bl.digits[i].push_back(cur);
                for (std::size_t pos = len; pos > 0; --pos) {
                    if (++odo[pos - 1] < inst.alphabet_size()) {
                        cur[pos - 1] = symbol_digit(odo[pos - 1]);
                        break;
                    }
                    odo[pos - 1] = 0;
                    cur[pos - 1] = symbol_digit(0);
                }
            }
        }
        return bl;
    }
};

TestPlan build_plan(const Blocks& bl, std::uint32_t r_eff, std::int64_t ell,
                    std::uint64_t seed) {
    if (r_eff > 20)
        throw ResourceError("2^" + std::to_string(r_eff) +
                            " seed sets exceed the supported plan size (r <= 20)");
    TestPlan plan;
    plan.r_eff = r_eff;
    plan.seeds.resize(std::size_t{1} << r_eff);
    for (std::uint64_t mask = 0; mask < plan.seeds.size(); ++mask) {
        SeedPlan& sp = plan.seeds[mask];
        sp.id = mask;
        Rng rng(derive_stream(seed, kTagPlan, mask));
        sp.matched.assign(r_eff, {});
        for (std::int64_t t = 0; t < ell; ++t) {
            auto perm = rng.permutation(r_eff);
            for (std::uint32_t p = 0; p + 1 < r_eff; p += 2) {
                sp.matched[perm[p]].push_back(perm[p + 1]);
                sp.matched[perm[p + 1]].push_back(perm[p]);
            }
            sp.perms.push_back(std::move(perm));
        }
        sp.tested_in_block.assign(r_eff, {});
        for (std::uint32_t i = 0; i < r_eff; ++i) {
            auto& m = sp.matched[i];
            std::sort(m.begin(), m.end());
            m.erase(std::unique(m.begin(), m.end()), m.end());
            auto& tested = sp.tested_in_block[i];
            for (std::uint32_t j : m)
                tested.insert(tested.end(), bl.neighbors[i][j].begin(), bl.neighbors[i][j].end());
            std::sort(tested.begin(), tested.end());
            tested.erase(std::unique(tested.begin(), tested.end()), tested.end());
            sp.test_vertices.insert(sp.test_vertices.end(), tested.begin(), tested.end());
        }
        std::sort(sp.test_vertices.begin(), sp.test_vertices.end());
        sp.test_vertices.erase(std::unique(sp.test_vertices.begin(), sp.test_vertices.end()),
                               sp.test_vertices.end());
    }
    return plan;
}

// For every block, the positions of its tested vertices: (index within the
// block's vertex list, index within the seed plan's test_vertices).
std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>
tested_positions(const Blocks& bl, const SeedPlan& sp, std::uint32_t r_eff) {
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> out(r_eff);
    for (std::uint32_t i = 0; i < r_eff; ++i) {
        for (std::uint32_t v : sp.tested_in_block[i]) {
            const auto& verts = bl.vertices[i];
            const auto bit = std::lower_bound(verts.begin(), verts.end(), v);
            const auto tit = std::lower_bound(sp.test_vertices.begin(), sp.test_vertices.end(), v);
            out[i].push_back({static_cast<std::uint32_t>(bit - verts.begin()),
                              static_cast<std::uint32_t>(tit - sp.test_vertices.begin())});
        }
    }
    return out;
}

// Local indices of block assignments agreeing with `sigma` on the tested part.
std::vector<std::uint32_t> matching_assignments(
    const Blocks& bl, std::uint32_t block,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& req, const std::string& sigma) {
    std::vector<std::uint32_t> out;
    const auto& digs = bl.digits[block];
    for (std::uint32_t m = 0; m < digs.size(); ++m) {
        bool ok = true;
        for (const auto& [local, tpos] : req) {
            if (digs[m][local] != sigma[tpos]) {
                ok = false;
                break;
            }
        }
        if (ok)
            out.push_back(m);
    }
    return out;
}

bool is_satisfying(const LabelCoverInstance& inst, const PartialAssignment& phi) {
    if (phi.size() != inst.num_vertices() || !phi.total())
        return false;
    for (const auto& e : inst.edges()) {
        const std::uint32_t va = inst.a_vertex(e.a);
        const std::uint32_t vb = inst.b_vertex(e.b);
        if (e.projection[phi.value(va)] != phi.value(vb))
            return false;
    }
    return true;
}

std::string block_digits_of(const ReductionOutput& out, const PartialAssignment& phi,
                            std::uint32_t block) {
    std::string s;
    if (block < out.partition.blocks.size())
        for (std::uint32_t v : out.partition.blocks[block])
            s.push_back(symbol_digit(phi.value(v)));
    return s;
}

} // namespace

char symbol_digit(std::uint32_t symbol) {
    if (symbol < 10)
        return static_cast<char>('0' + symbol);
    if (symbol < 36)
        return static_cast<char>('a' + (symbol - 10));
    throw InputError("alphabet too large for digit labels (max 36 symbols)");
}

std::uint32_t digit_symbol(char c) {
    if (c >= '0' && c <= '9')
        return static_cast<std::uint32_t>(c - '0');
    if (c >= 'a' && c <= 'z')
        return static_cast<std::uint32_t>(c - 'a' + 10);
    throw InputError(std::string("invalid symbol digit: ") + c);
}

std::uint64_t threshold_projection(std::uint64_t h_mask, std::uint32_t r, std::uint32_t k) {
    if (k == 0)
        throw InputError("k must be positive");
    if (static_cast<std::uint64_t>(r) * k > 63)
        throw InputError("r*k must be at most 63 for mask arithmetic");
    std::uint64_t out = 0;
    for (std::uint32_t i = 0; i < r; ++i) {
        std::uint32_t cnt = 0;
        for (std::uint32_t j = 0; j < k; ++j)
            if ((h_mask >> (static_cast<std::uint64_t>(i) * k + j)) & 1u)
                ++cnt;
        if (2ull * cnt >= k)
            out |= std::uint64_t{1} << i;
    }
    return out;
}

std::vector<std::string> enumerate_consistent_assignments(const LabelCoverInstance& inst,
                                                          const std::vector<std::uint32_t>& vertices,
                                                          std::uint64_t cap) {
    struct Check {
        std::uint32_t a_pos, b_pos;
        const std::vector<std::uint32_t>* projection;
    };
    std::vector<std::vector<Check>> checks(vertices.size() + 1);
    for (const auto& e : inst.edges()) {
        const std::uint32_t va = inst.a_vertex(e.a);
        const std::uint32_t vb = inst.b_vertex(e.b);
        const auto ia = std::lower_bound(vertices.begin(), vertices.end(), va);
        if (ia == vertices.end() || *ia != va)
            continue;
        const auto ib = std::lower_bound(vertices.begin(), vertices.end(), vb);
        if (ib == vertices.end() || *ib != vb)
            continue;
        const auto pa = static_cast<std::uint32_t>(ia - vertices.begin());
        const auto pb = static_cast<std::uint32_t>(ib - vertices.begin());
        checks[std::max(pa, pb)].push_back({pa, pb, &e.projection});
    }

    std::vector<std::string> out;
    std::vector<std::uint32_t> sym(vertices.size(), 0);
    std::string digits(vertices.size(), symbol_digit(0));

    // depth-first over positions, pruning on the first violated edge
    std::size_t pos = 0;
    std::vector<std::uint32_t> next(vertices.size() + 1, 0);
    while (true) {
        if (pos == vertices.size()) {
            out.push_back(digits);
            if (out.size() > cap)
                throw ResourceError("consistent-assignment enumeration exceeded the cap of " +
                                    std::to_string(cap));
            if (pos == 0)
                return out;
            --pos;
            continue;
        }
        bool advanced = false;
        for (std::uint32_t s = next[pos]; s < inst.alphabet_size(); ++s) {
            sym[pos] = s;
            bool ok = true;
            for (const auto& c : checks[pos]) {
                if ((*c.projection)[sym[c.a_pos]] != sym[c.b_pos]) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                digits[pos] = symbol_digit(s);
                next[pos] = s + 1;
                next[pos + 1] = 0;
                ++pos;
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            next[pos] = 0;
            if (pos == 0)
                return out;
            --pos;
        }
    }
}

ReductionOutput vc_reduction(const LabelCoverInstance& inst, const ReductionParams& params) {
    if (inst.alphabet_size() > 36)
        throw InputError("alphabet too large for digit labels (max 36 symbols)");
    const Resolved rv = resolve_params(inst, params, ReductionMode::vc);

    ReductionOutput out;
    out.mode = ReductionMode::vc;
    out.instance = inst;
    out.r = rv.r;
    out.r_eff = rv.r_eff;
    out.padded = rv.padded;
    out.ell = rv.ell;
    out.k = 1;
    out.delta = rv.delta;
    out.seed = params.seed;
    out.caps = params.caps;
    out.param_records = rv.records;

    out.partition = partition_blocks(inst, rv.r, derive_stream(params.seed, kTagPartitionSeed, 0),
                                     params.caps.partition_retries);
    const Blocks bl = Blocks::build(inst, out.partition, rv.r_eff, params.caps.max_universe);

    std::uint64_t x_count = 0;
    std::vector<std::uint64_t> x_base(rv.r_eff, 0);
    for (std::uint32_t i = 0; i < rv.r_eff; ++i) {
        x_base[i] = x_count;
        x_count += bl.x_per_block[i];
        if (x_count > params.caps.max_universe)
            break;
    }
    const std::uint64_t universe_size = x_count + rv.r_eff;
    if (universe_size > params.caps.max_universe)
        throw ResourceError("universe needs " + std::to_string(universe_size) +
                            " elements (sum over blocks of |alphabet|^|block| plus r), above the cap of " +
                            std::to_string(params.caps.max_universe));

    std::vector<std::string> element_labels;
    element_labels.reserve(universe_size);
    for (std::uint32_t i = 0; i < rv.r_eff; ++i)
        for (std::uint64_t m = 0; m < bl.x_per_block[i]; ++m) {
            element_labels.push_back("x:" + std::to_string(i + 1) + ":" + bl.digits[i][m]);
            out.element_kinds.push_back({true, i, -1, bl.digits[i][m], 0});
        }
    const std::uint64_t y_base = x_count;
    for (std::uint32_t i = 0; i < rv.r_eff; ++i) {
        element_labels.push_back("y:" + std::to_string(i + 1));
        out.element_kinds.push_back({false, i, -1, "", 0});
    }

    out.plan = build_plan(bl, rv.r_eff, rv.ell, params.seed);
    const std::size_t n_seeds = out.plan.seeds.size();

    std::vector<std::vector<std::string>> sigmas(n_seeds);
    std::uint64_t sigma_total = 0;
    for (std::size_t h = 0; h < n_seeds; ++h) {
        sigmas[h] = enumerate_consistent_assignments(inst, out.plan.seeds[h].test_vertices,
                                                     params.caps.max_concepts);
        sigma_total += sigmas[h].size();
        if (sigma_total * n_seeds > params.caps.max_concepts)
            throw ResourceError("concept count 2^r * sum_H #consistent >= " +
                                std::to_string(sigma_total * n_seeds) + ", above the cap of " +
                                std::to_string(params.caps.max_concepts));
    }
    const std::uint64_t n_concepts = sigma_total * n_seeds;
    if (n_concepts * universe_size > params.caps.max_matrix_bits)
        throw ResourceError("membership matrix needs " +
                            std::to_string(n_concepts * universe_size) + " bits, above the cap of " +
                            std::to_string(params.caps.max_matrix_bits));

    // Matching assignment elements per (seed set, consistent assignment, block).
    std::vector<std::vector<std::vector<std::vector<std::uint32_t>>>> matches(n_seeds);
    for (std::size_t h = 0; h < n_seeds; ++h) {
        const auto req = tested_positions(bl, out.plan.seeds[h], rv.r_eff);
        matches[h].resize(sigmas[h].size());
        for (std::size_t s = 0; s < sigmas[h].size(); ++s) {
            matches[h][s].resize(rv.r_eff);
            for (std::uint32_t i = 0; i < rv.r_eff; ++i)
                matches[h][s][i] = matching_assignments(bl, i, req[i], sigmas[h][s]);
        }
    }

    std::vector<BitRow> rows;
    std::vector<std::string> concept_labels;
    rows.reserve(n_concepts);
    for (std::uint64_t i_mask = 0; i_mask < n_seeds; ++i_mask)
        for (std::uint64_t h_mask = 0; h_mask < n_seeds; ++h_mask)
            for (std::size_t s = 0; s < sigmas[h_mask].size(); ++s) {
                BitRow row(universe_size);
                for (std::uint32_t i = 0; i < rv.r_eff; ++i) {
                    if (!((i_mask >> i) & 1u))
                        continue;
                    for (std::uint32_t m : matches[h_mask][s][i])
                        row.set(x_base[i] + m, true);
                }
                for (std::uint32_t i = 0; i < rv.r_eff; ++i)
                    if ((h_mask >> i) & 1u)
                        row.set(y_base + i, true);
                rows.push_back(std::move(row));
                concept_labels.push_back("c:" + std::to_string(i_mask) + ":" +
                                         std::to_string(h_mask) + ":" + sigmas[h_mask][s]);
                out.concept_meta.push_back({i_mask, h_mask, sigmas[h_mask][s]});
            }

    out.cls = ConceptClass::make(std::move(element_labels), std::move(rows),
                                 std::move(concept_labels));
    return out;
}

ReductionOutput ls_reduction(const LabelCoverInstance& inst, const ReductionParams& params) {
    if (inst.alphabet_size() > 36)
        throw InputError("alphabet too large for digit labels (max 36 symbols)");
    const Resolved rv = resolve_params(inst, params, ReductionMode::ls);
    const std::uint32_t k = static_cast<std::uint32_t>(rv.k);
    const std::uint32_t rk = rv.r_eff * k;
    if (rk > params.caps.max_rk)
        throw ResourceError("r*k=" + std::to_string(rk) + " exceeds the cap of " +
                            std::to_string(params.caps.max_rk) + " (test-selection elements scale as rk*2^rk)");

    ReductionOutput out;
    out.mode = ReductionMode::ls;
    out.instance = inst;
    out.r = rv.r;
    out.r_eff = rv.r_eff;
    out.padded = rv.padded;
    out.ell = rv.ell;
    out.k = rv.k;
    out.delta = rv.delta;
    out.seed = params.seed;
    out.caps = params.caps;
    out.param_records = rv.records;

    out.partition = partition_blocks(inst, rv.r, derive_stream(params.seed, kTagPartitionSeed, 0),
                                     params.caps.partition_retries);
    const Blocks bl = Blocks::build(inst, out.partition, rv.r_eff, params.caps.max_universe);

    const std::uint64_t i_space = std::uint64_t{1} << rk;

    std::uint64_t x_count = 0;
    std::vector<std::uint64_t> x_base(rv.r_eff, 0);
    for (std::uint32_t i = 0; i < rv.r_eff; ++i) {
        x_base[i] = x_count;
        x_count += bl.x_per_block[i] * k;
        if (x_count > params.caps.max_universe)
            break;
    }
    const std::uint64_t y_total = static_cast<std::uint64_t>(rk) * i_space;
    const std::uint64_t universe_size = x_count + y_total;
    if (universe_size > params.caps.max_universe)
        throw ResourceError("universe needs " + std::to_string(universe_size) +
                            " elements (k*sum |alphabet|^|block| + rk*2^rk), above the cap of " +
                            std::to_string(params.caps.max_universe));

    std::vector<std::string> element_labels;
    element_labels.reserve(universe_size);
    for (std::uint32_t i = 0; i < rv.r_eff; ++i)
        for (std::uint32_t j = 0; j < k; ++j)
            for (std::uint64_t m = 0; m < bl.x_per_block[i]; ++m) {
                element_labels.push_back("x:" + std::to_string(i + 1) + ":" + bl.digits[i][m] +
                                         ":" + std::to_string(j + 1));
                out.element_kinds.push_back({true, i, static_cast<std::int64_t>(j),
                                             bl.digits[i][m], 0});
            }
    const std::uint64_t y_base = x_count;
    std::vector<std::uint64_t> y_block_base(rv.r_eff, 0);
    for (std::uint32_t i = 0; i < rv.r_eff; ++i) {
        y_block_base[i] = y_base + static_cast<std::uint64_t>(i) * i_space * k;
        for (std::uint64_t imask = 0; imask < i_space; ++imask)
            for (std::uint32_t j = 0; j < k; ++j) {
                element_labels.push_back("y:" + std::to_string(i + 1) + ":" +
                                         std::to_string(imask) + ":" + std::to_string(j + 1));
                out.element_kinds.push_back({false, i, static_cast<std::int64_t>(j), "", imask});
            }
    }

    out.plan = build_plan(bl, rv.r_eff, rv.ell, params.seed);
    const std::size_t n_tau = out.plan.seeds.size();

    std::vector<std::vector<std::string>> sigmas(n_tau);
    for (std::size_t h = 0; h < n_tau; ++h)
        sigmas[h] = enumerate_consistent_assignments(inst, out.plan.seeds[h].test_vertices,
                                                     params.caps.max_concepts);

    std::vector<std::uint64_t> tau_of(i_space);
    std::uint64_t per_i_concepts = 0;
    for (std::uint64_t h = 0; h < i_space; ++h) {
        tau_of[h] = threshold_projection(h, rv.r_eff, k);
        per_i_concepts += sigmas[tau_of[h]].size();
    }
    const std::uint64_t n_concepts = per_i_concepts * i_space;
    if (n_concepts > params.caps.max_concepts)
        throw ResourceError("concept count 2^rk * sum_H #consistent = " +
                            std::to_string(n_concepts) + ", above the cap of " +
                            std::to_string(params.caps.max_concepts));
    if (n_concepts * universe_size > params.caps.max_matrix_bits)
        throw ResourceError("membership matrix needs " +
                            std::to_string(n_concepts * universe_size) + " bits, above the cap of " +
                            std::to_string(params.caps.max_matrix_bits));

    std::vector<std::vector<std::vector<std::vector<std::uint32_t>>>> matches(n_tau);
    for (std::size_t h = 0; h < n_tau; ++h) {
        const auto req = tested_positions(bl, out.plan.seeds[h], rv.r_eff);
        matches[h].resize(sigmas[h].size());
        for (std::size_t s = 0; s < sigmas[h].size(); ++s) {
            matches[h][s].resize(rv.r_eff);
            for (std::uint32_t i = 0; i < rv.r_eff; ++i)
                matches[h][s][i] = matching_assignments(bl, i, req[i], sigmas[h][s]);
        }
    }

    std::vector<BitRow> rows;
    std::vector<std::string> concept_labels;
    rows.reserve(n_concepts);
    for (std::uint64_t i_mask = 0; i_mask < i_space; ++i_mask)
        for (std::uint64_t h_mask = 0; h_mask < i_space; ++h_mask) {
            const std::uint64_t tau = tau_of[h_mask];
            for (std::size_t s = 0; s < sigmas[tau].size(); ++s) {
                BitRow row(universe_size);
                for (std::uint32_t i = 0; i < rv.r_eff; ++i)
                    for (std::uint32_t j = 0; j < k; ++j) {
                        if (!((i_mask >> (static_cast<std::uint64_t>(i) * k + j)) & 1u))
                            continue;
                        for (std::uint32_t m : matches[tau][s][i])
                            row.set(x_base[i] + static_cast<std::uint64_t>(j) * bl.x_per_block[i] + m,
                                    true);
                    }
                for (std::uint32_t i = 0; i < rv.r_eff; ++i)
                    for (std::uint32_t j = 0; j < k; ++j)
                        if ((h_mask >> (static_cast<std::uint64_t>(i) * k + j)) & 1u)
                            row.set(y_block_base[i] + i_mask * k + j, true);
                rows.push_back(std::move(row));
                concept_labels.push_back("c:" + std::to_string(i_mask) + ":" +
                                         std::to_string(h_mask) + ":" + sigmas[tau][s]);
                out.concept_meta.push_back({i_mask, h_mask, sigmas[tau][s]});
            }
        }

    out.cls = ConceptClass::make(std::move(element_labels), std::move(rows),
                                 std::move(concept_labels));
    return out;
}

std::vector<std::size_t> vc_completeness_certificate(const ReductionOutput& out,
                                                     const PartialAssignment& sigma_star) {
    if (out.mode != ReductionMode::vc)
        throw InputError("certificate requires an output of the shattering construction");
    if (!is_satisfying(out.instance, sigma_star))
        throw InputError("certificate requires a total satisfying assignment");
    std::vector<std::size_t> set;
    for (std::uint32_t i = 0; i < out.r_eff; ++i) {
        const std::string label =
            "x:" + std::to_string(i + 1) + ":" + block_digits_of(out, sigma_star, i);
        set.push_back(out.cls.universe().position(label));
    }
    for (std::uint32_t i = 0; i < out.r_eff; ++i)
        set.push_back(out.cls.universe().position("y:" + std::to_string(i + 1)));
    std::sort(set.begin(), set.end());
    return set;
}

MistakeTree ls_completeness_tree(const ReductionOutput& out,
                                 const PartialAssignment& sigma_star) {
    if (out.mode != ReductionMode::ls)
        throw InputError("completeness tree requires an output of the online construction");
    if (!is_satisfying(out.instance, sigma_star))
        throw InputError("completeness tree requires a total satisfying assignment");
    const std::uint32_t k = static_cast<std::uint32_t>(out.k);
    const std::uint32_t rk = out.r_eff * k;
    const int depth = static_cast<int>(2 * rk);
    if (depth > 22)
        throw ResourceError("completeness tree of depth " + std::to_string(depth) +
                            " is too large to materialize");

    MistakeTree tree;
    tree.depth = depth;
    tree.node_elements.assign((std::size_t{1} << depth) - 1, 0);
    tree.leaf_witnesses.assign(std::size_t{1} << depth, 0);

    // assignment-element positions per (block, copy)
    std::vector<std::size_t> x_pos(rk);
    for (std::uint32_t i = 0; i < out.r_eff; ++i) {
        const std::string digs = block_digits_of(out, sigma_star, i);
        for (std::uint32_t j = 0; j < k; ++j)
            x_pos[static_cast<std::size_t>(i) * k + j] = out.cls.universe().position(
                "x:" + std::to_string(i + 1) + ":" + digs + ":" + std::to_string(j + 1));
    }

    // digit strings of the satisfying assignment on each seed plan's test set
    std::vector<std::string> tau_digits(out.plan.seeds.size());
    for (std::size_t t = 0; t < out.plan.seeds.size(); ++t) {
        std::string s;
        for (std::uint32_t v : out.plan.seeds[t].test_vertices)
            s.push_back(symbol_digit(sigma_star.value(v)));
        tau_digits[t] = std::move(s);
    }

    std::unordered_map<std::string, std::uint32_t> concept_index;
    concept_index.reserve(out.cls.num_concepts());
    for (std::size_t c = 0; c < out.cls.num_concepts(); ++c)
        concept_index.emplace(out.cls.concept_labels()[c], static_cast<std::uint32_t>(c));

    for (std::uint32_t level = 0; level < rk; ++level)
        for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << level); ++prefix)
            tree.node_elements[MistakeTree::node_slot(static_cast<int>(level), prefix)] =
                x_pos[level];

    for (std::uint32_t level = rk; level < 2 * rk; ++level) {
        const std::uint32_t i = (level - rk) / k;
        const std::uint32_t j = (level - rk) % k;
        for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << level); ++prefix) {
            std::uint64_t i_mask = 0;
            for (std::uint32_t t = 0; t < rk; ++t)
                if ((prefix >> (level - 1 - t)) & 1u)
                    i_mask |= std::uint64_t{1} << t;
            tree.node_elements[MistakeTree::node_slot(static_cast<int>(level), prefix)] =
                out.cls.universe().position("y:" + std::to_string(i + 1) + ":" +
                                            std::to_string(i_mask) + ":" + std::to_string(j + 1));
        }
    }

    for (std::uint64_t leaf = 0; leaf < (std::uint64_t{1} << depth); ++leaf) {
        std::uint64_t i_mask = 0, h_mask = 0;
        for (std::uint32_t t = 0; t < rk; ++t)
            if ((leaf >> (2 * rk - 1 - t)) & 1u)
                i_mask |= std::uint64_t{1} << t;
        for (std::uint32_t t = rk; t < 2 * rk; ++t)
            if ((leaf >> (2 * rk - 1 - t)) & 1u)
                h_mask |= std::uint64_t{1} << (t - rk);
        const std::uint64_t tau = threshold_projection(h_mask, out.r_eff, k);
        const std::string label = "c:" + std::to_string(i_mask) + ":" + std::to_string(h_mask) +
                                  ":" + tau_digits[tau];
        const auto it = concept_index.find(label);
        if (it == concept_index.end())
            throw std::logic_error("completeness tree references a missing concept: " + label);
        tree.leaf_witnesses[leaf] = it->second;
    }
    return tree;
}

} // namespace ccdim
