#include "ccdim/dimensions.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cassert>
#include <numeric>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ccdim/errors.hpp"

namespace ccdim {

namespace {

int resolve_threads(int requested) {
#ifdef _OPENMP
    if (requested <= 0)
        return omp_get_max_threads();
    return requested;
#else
    (void)requested;
    return 1;
#endif
}

constexpr int kBoundsInf = std::numeric_limits<int>::max();

struct Bounds {
    int le = kBoundsInf; // smallest d with a proven "dimension <= d"
    int gt = -1;         // largest d with a proven "dimension > d"
};

// Version spaces as 64-bit masks over distinct rows; used whenever the class
// has at most 64 distinct concepts.
struct MaskRep {
    using Live = std::uint64_t;

    struct Hash {
        std::size_t operator()(std::uint64_t v) const {
            v ^= v >> 33;
            v *= 0xff51afd7ed558ccdULL;
            v ^= v >> 33;
            return static_cast<std::size_t>(v);
        }
    };
    using Memo = std::unordered_map<Live, Bounds, Hash>;

    std::vector<std::uint64_t> one_mask; // per element: distinct rows containing it
    std::vector<std::uint32_t> representative;
    Live full = 0;

    void init(const ConceptClass& cls) {
        const auto& dd = cls.dedup();
        representative = dd.representative;
        full = dd.distinct >= 64 ? ~std::uint64_t{0}
                                 : ((std::uint64_t{1} << dd.distinct) - 1);
        one_mask.assign(cls.num_elements(), 0);
        for (std::size_t x = 0; x < cls.num_elements(); ++x) {
            std::uint64_t m = 0;
            for (std::size_t id = 0; id < dd.distinct; ++id)
                if (cls.member(dd.representative[id], x))
                    m |= std::uint64_t{1} << id;
            one_mask[x] = m;
        }
    }

    static std::size_t count(Live s) { return static_cast<std::size_t>(std::popcount(s)); }
    static bool is_empty(Live s) { return s == 0; }
    Live split1(Live s, std::size_t x) const { return s & one_mask[x]; }
    Live split0(Live s, std::size_t x) const { return s & ~one_mask[x]; }
    std::uint32_t lowest(Live s) const { return static_cast<std::uint32_t>(std::countr_zero(s)); }
};

// Fallback for classes with more than 64 distinct concepts: version spaces
// as sorted vectors of distinct-row ids.
struct VecRep {
    using Live = std::vector<std::uint32_t>;

    struct Hash {
        std::size_t operator()(const Live& v) const {
            std::uint64_t h = 0xcbf29ce484222325ULL ^ v.size();
            for (std::uint32_t x : v) {
                h ^= x;
                h *= 0x100000001b3ULL;
            }
            return static_cast<std::size_t>(h);
        }
    };
    using Memo = std::unordered_map<Live, Bounds, Hash>;

    const ConceptClass* cls = nullptr;
    std::vector<std::uint32_t> representative;
    Live full;

    void init(const ConceptClass& c) {
        cls = &c;
        const auto& dd = c.dedup();
        representative = dd.representative;
        full.resize(dd.distinct);
        std::iota(full.begin(), full.end(), 0u);
    }

    bool bit(std::uint32_t id, std::size_t x) const {
        return cls->member(representative[id], x);
    }

    static std::size_t count(const Live& s) { return s.size(); }
    static bool is_empty(const Live& s) { return s.empty(); }

    Live split1(const Live& s, std::size_t x) const {
        Live out;
        for (std::uint32_t id : s)
            if (bit(id, x))
                out.push_back(id);
        return out;
    }
    Live split0(const Live& s, std::size_t x) const {
        Live out;
        for (std::uint32_t id : s)
            if (!bit(id, x))
                out.push_back(id);
        return out;
    }
    std::uint32_t lowest(const Live& s) const { return s[0]; }
};

// Depth-capped recursion: a tree rooted at a usable element x of depth d+1
// exists iff both restrictions admit depth-d trees.
template <class Rep>
struct Core {
    const Rep* rep = nullptr;
    const std::vector<std::size_t>* allowed = nullptr;
    typename Rep::Memo memo;
    std::uint64_t nodes = 0;
    std::uint64_t budget = 0;

    bool has_usable(const typename Rep::Live& live) const {
        for (std::size_t x : *allowed) {
            auto l1 = rep->split1(live, x);
            if (Rep::is_empty(l1))
                continue;
            if (Rep::count(l1) != Rep::count(live))
                return true;
        }
        return false;
    }

    bool at_most(const typename Rep::Live& live, int d) {
        ++nodes;
        if (budget && nodes > budget)
            throw ResourceError("dimension recursion exceeded node budget of " +
                                std::to_string(budget));
        if (Rep::count(live) <= 1)
            return true;
        if (auto it = memo.find(live); it != memo.end()) {
            if (d >= it->second.le)
                return true;
            if (d <= it->second.gt)
                return false;
        }
        bool res;
        if (d == 0) {
            res = !has_usable(live);
        } else {
            res = true;
            for (std::size_t x : *allowed) {
                auto l1 = rep->split1(live, x);
                if (Rep::is_empty(l1))
                    continue;
                auto l0 = rep->split0(live, x);
                if (Rep::is_empty(l0))
                    continue;
                if (!at_most(l0, d - 1) && !at_most(l1, d - 1)) {
                    res = false;
                    break;
                }
            }
        }
        Bounds& b = memo[live];
        if (res)
            b.le = std::min(b.le, d);
        else
            b.gt = std::max(b.gt, d);
        return res;
    }

    int value(const typename Rep::Live& live) {
        if (Rep::count(live) <= 1)
            return 0;
        const int cap = floor_log2(Rep::count(live));
        for (int d = 0; d < cap; ++d)
            if (at_most(live, d))
                return d;
        return cap;
    }

    void build_tree(const typename Rep::Live& live, int level, std::uint64_t prefix, int depth,
                    MistakeTree& tree) {
        if (level == depth) {
            tree.leaf_witnesses[prefix] = rep->representative[rep->lowest(live)];
            return;
        }
        const int need = depth - level - 1;
        for (std::size_t x : *allowed) {
            auto l1 = rep->split1(live, x);
            if (Rep::is_empty(l1))
                continue;
            auto l0 = rep->split0(live, x);
            if (Rep::is_empty(l0))
                continue;
            if (need > 0 && (at_most(l0, need - 1) || at_most(l1, need - 1)))
                continue;
            tree.node_elements[MistakeTree::node_slot(level, prefix)] = x;
            build_tree(l0, level + 1, prefix << 1, depth, tree);
            build_tree(l1, level + 1, (prefix << 1) | 1, depth, tree);
            return;
        }
        assert(false && "tree reconstruction lost a guaranteed branch");
        throw std::logic_error("mistake tree reconstruction failed");
    }
};

template <class Rep>
struct Lane {
    Rep rep;
    Core<Rep> core;
    std::vector<std::unique_ptr<Core<Rep>>> workers;
    std::vector<std::size_t> allowed;
    int threads = 1;

    void init(const ConceptClass& cls, std::vector<std::size_t> allowed_in,
              const DimOptions& opts) {
        rep.init(cls);
        allowed = std::move(allowed_in);
        core.rep = &rep;
        core.allowed = &allowed;
        core.budget = opts.node_budget;
        threads = opts.node_budget ? 1 : resolve_threads(opts.threads);
    }

    std::uint64_t total_nodes() const {
        std::uint64_t n = core.nodes;
        for (const auto& w : workers)
            n += w->nodes;
        return n;
    }

    bool root_at_most(int d) {
        if (threads <= 1 || d == 0 || Rep::count(rep.full) <= 1)
            return core.at_most(rep.full, d);
#ifdef _OPENMP
        std::vector<std::size_t> usable;
        for (std::size_t x : allowed) {
            auto l1 = rep.split1(rep.full, x);
            if (!Rep::is_empty(l1) && Rep::count(l1) != Rep::count(rep.full))
                usable.push_back(x);
        }
        core.nodes += 1; // the root invocation
        if (usable.empty())
            return true;
        if (workers.empty())
            for (int t = 0; t < threads; ++t) {
                workers.push_back(std::make_unique<Core<Rep>>());
                workers.back()->rep = &rep;
                workers.back()->allowed = &allowed;
            }
        std::atomic<bool> counterexample{false};
        // Static schedule keeps the iteration-to-thread mapping, and with it
        // the per-worker cache contents and node counts, reproducible.
        #pragma omp parallel for schedule(static) num_threads(threads)
        for (std::size_t i = 0; i < usable.size(); ++i) {
            Core<Rep>& w = *workers[static_cast<std::size_t>(omp_get_thread_num())];
            const std::size_t x = usable[i];
            auto l0 = rep.split0(rep.full, x);
            auto l1 = rep.split1(rep.full, x);
            if (!w.at_most(l0, d - 1) && !w.at_most(l1, d - 1))
                counterexample.store(true, std::memory_order_relaxed);
        }
        return !counterexample.load();
#else
        return core.at_most(rep.full, d);
#endif
    }

    LsResult dimension() {
        LsResult res;
        if (Rep::count(rep.full) == 0) {
            res.nodes = total_nodes();
            return res;
        }
        res.defined = true;
        const int cap = floor_log2(Rep::count(rep.full));
        int d = 0;
        while (d < cap && !root_at_most(d))
            ++d;
        res.dimension = d;
        if (d > 25)
            throw ResourceError("mistake tree of depth " + std::to_string(d) +
                                " is too large to materialize");
        res.tree.depth = d;
        res.tree.node_elements.assign((std::size_t{1} << d) - 1, 0);
        res.tree.leaf_witnesses.assign(std::size_t{1} << d, 0);
        core.build_tree(rep.full, 0, 0, d, res.tree);
        res.nodes = total_nodes();
        return res;
    }

    std::vector<std::uint32_t> reps_of(const typename Rep::Live& live) {
        std::vector<std::uint32_t> out;
        if constexpr (std::is_same_v<Rep, MaskRep>) {
            for (std::uint64_t s = live; s; s &= s - 1)
                out.push_back(rep.representative[std::countr_zero(s)]);
        } else {
            for (std::uint32_t id : live)
                out.push_back(rep.representative[id]);
        }
        return out;
    }

    bool predict(const typename Rep::Live& live, std::size_t x, const Learner& learner) {
        if (learner) {
            auto r = reps_of(live);
            return learner(std::span<const std::uint32_t>(r), x);
        }
        auto l0 = rep.split0(live, x);
        auto l1 = rep.split1(live, x);
        const int v0 = Rep::is_empty(l0) ? -1 : core.value(l0);
        const int v1 = Rep::is_empty(l1) ? -1 : core.value(l1);
        return v1 >= v0;
    }

    GameTranscript play(const ConceptClass& cls, const GameConfig& cfg, const Learner& learner,
                        std::optional<LsResult>& cached_dim) {
        if (cls.empty())
            throw InputError("online game requires a nonempty class");
        if (cfg.adversary == cfg.target.has_value())
            throw InputError("choose exactly one of target concept / adversary");
        GameTranscript t;
        typename Rep::Live live = rep.full;
        if (cfg.adversary) {
            if (!cached_dim)
                cached_dim = dimension();
            const MistakeTree& tree = cached_dim->tree;
            const std::size_t steps =
                std::min<std::size_t>(static_cast<std::size_t>(cached_dim->dimension),
                                      cfg.max_steps);
            std::uint64_t prefix = 0;
            for (std::size_t lvl = 0; lvl < steps; ++lvl) {
                const std::size_t x =
                    tree.node_elements[MistakeTree::node_slot(static_cast<int>(lvl), prefix)];
                const bool p = predict(live, x, learner);
                const bool h = !p;
                t.steps.push_back({x, p, h});
                ++t.mistakes;
                live = h ? rep.split1(live, x) : rep.split0(live, x);
                prefix = (prefix << 1) | (h ? 1u : 0u);
                if (Rep::is_empty(live))
                    throw ProtocolError("adversary reached an empty version space");
            }
        } else {
            const std::uint32_t target = *cfg.target;
            if (target >= cls.num_concepts())
                throw InputError("target concept index out of range");
            std::vector<std::size_t> order = cfg.order;
            if (order.empty()) {
                order.resize(cls.num_elements());
                std::iota(order.begin(), order.end(), std::size_t{0});
            }
            for (std::size_t x : order)
                cls.check_position(x);
            const std::size_t steps = std::min(order.size(), cfg.max_steps);
            for (std::size_t i = 0; i < steps; ++i) {
                const std::size_t x = order[i];
                const bool h = cls.member(target, x);
                const bool p = predict(live, x, learner);
                t.steps.push_back({x, p, h});
                if (p != h)
                    ++t.mistakes;
                live = h ? rep.split1(live, x) : rep.split0(live, x);
                if (Rep::is_empty(live))
                    throw ProtocolError("revealed labels are inconsistent with every concept");
            }
        }
        return t;
    }
};

std::vector<std::size_t> default_allowed(const ConceptClass& cls) {
    std::vector<std::size_t> all(cls.num_elements());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
}

} // namespace

struct LsEngine::Impl {
    const ConceptClass* cls;
    bool mask_mode;
    Lane<MaskRep> mask_lane;
    Lane<VecRep> vec_lane;
    std::optional<LsResult> cached_dim;

    Impl(const ConceptClass& c, std::vector<std::size_t> allowed, const DimOptions& opts)
        : cls(&c), mask_mode(c.dedup().distinct <= 64) {
        if (allowed.empty())
            allowed = default_allowed(c);
        else {
            std::vector<bool> seen(c.num_elements(), false);
            for (std::size_t x : allowed) {
                c.check_position(x);
                if (seen[x])
                    throw InputError("allowed element positions must be distinct");
                seen[x] = true;
            }
        }
        if (mask_mode)
            mask_lane.init(c, std::move(allowed), opts);
        else
            vec_lane.init(c, std::move(allowed), opts);
    }
};

LsEngine::LsEngine(const ConceptClass& cls, std::vector<std::size_t> allowed,
                   const DimOptions& opts)
    : impl_(std::make_unique<Impl>(cls, std::move(allowed), opts)) {}

LsEngine::~LsEngine() = default;
LsEngine::LsEngine(LsEngine&&) noexcept = default;
LsEngine& LsEngine::operator=(LsEngine&&) noexcept = default;

bool LsEngine::at_most(int d) {
    if (d < 0)
        throw InputError("depth bound must be non-negative");
    return impl_->mask_mode ? impl_->mask_lane.root_at_most(d)
                            : impl_->vec_lane.root_at_most(d);
}

LsResult LsEngine::dimension() {
    if (!impl_->cached_dim)
        impl_->cached_dim =
            impl_->mask_mode ? impl_->mask_lane.dimension() : impl_->vec_lane.dimension();
    return *impl_->cached_dim;
}

GameTranscript LsEngine::play(const GameConfig& cfg, const Learner& learner) {
    return impl_->mask_mode
               ? impl_->mask_lane.play(*impl_->cls, cfg, learner, impl_->cached_dim)
               : impl_->vec_lane.play(*impl_->cls, cfg, learner, impl_->cached_dim);
}

std::uint64_t LsEngine::nodes() const {
    return impl_->mask_mode ? impl_->mask_lane.total_nodes() : impl_->vec_lane.total_nodes();
}

bool ls_at_most(const ConceptClass& cls, int d, const DimOptions& opts, LsStats* stats) {
    LsEngine engine(cls, {}, opts);
    const bool res = engine.at_most(d);
    if (stats)
        stats->nodes = engine.nodes();
    return res;
}

LsResult ls_dimension(const ConceptClass& cls, const DimOptions& opts) {
    LsEngine engine(cls, {}, opts);
    return engine.dimension();
}

LsResult ls_dimension_on(const ConceptClass& cls, std::span<const std::size_t> allowed,
                         const DimOptions& opts) {
    LsResult res;
    if (cls.empty())
        return res;
    if (allowed.empty()) {
        // No usable elements at all: only the depth-0 tree exists.
        res.defined = true;
        res.dimension = 0;
        res.tree.depth = 0;
        res.tree.leaf_witnesses.assign(1, 0);
        res.nodes = 0;
        return res;
    }
    LsEngine engine(cls, std::vector<std::size_t>(allowed.begin(), allowed.end()), opts);
    return engine.dimension();
}

bool soa_predict(const ConceptClass& version_space, std::size_t element, const DimOptions& opts) {
    if (version_space.empty())
        throw InputError("version space is empty: labels inconsistent with the class");
    version_space.check_position(element);
    DimOptions serial = opts;
    serial.threads = 1;
    const ConceptClass c0 = version_space.restricted(element, false);
    const ConceptClass c1 = version_space.restricted(element, true);
    const int v0 = c0.empty() ? -1 : ls_dimension(c0, serial).dimension;
    const int v1 = c1.empty() ? -1 : ls_dimension(c1, serial).dimension;
    return v1 >= v0;
}

GameTranscript run_online_game(const ConceptClass& cls, const GameConfig& cfg,
                               const Learner& learner) {
    DimOptions opts;
    opts.threads = cfg.threads;
    LsEngine engine(cls, {}, opts);
    return engine.play(cfg, learner);
}

bool verify_mistake_tree(const ConceptClass& cls, const MistakeTree& tree) {
    if (tree.depth < 0 || tree.depth > 62)
        throw InputError("mistake tree depth out of range");
    const std::size_t leaves = std::size_t{1} << tree.depth;
    if (tree.node_elements.size() != leaves - 1)
        throw InputError("mistake tree is not structurally full");
    if (tree.leaf_witnesses.size() != leaves)
        throw InputError("mistake tree leaf witness table is incomplete");
    for (std::size_t e : tree.node_elements)
        if (e >= cls.num_elements())
            throw InputError("mistake tree node element out of range");
    for (std::uint32_t w : tree.leaf_witnesses)
        if (w >= cls.num_concepts())
            throw InputError("mistake tree witness index out of range");
    for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
        const std::uint32_t c = tree.leaf_witnesses[leaf];
        std::uint64_t prefix = 0;
        for (int lvl = 0; lvl < tree.depth; ++lvl) {
            const std::size_t x = tree.node_elements[MistakeTree::node_slot(lvl, prefix)];
            const bool bit = (leaf >> (tree.depth - 1 - lvl)) & 1u;
            if (cls.member(c, x) != bit)
                return false;
            prefix = (prefix << 1) | (bit ? 1u : 0u);
        }
    }
    return true;
}

std::optional<ShatterWitness> is_shattered(const ConceptClass& cls,
                                           std::span<const std::size_t> positions) {
    std::vector<std::size_t> sorted(positions.begin(), positions.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<bool> seen(cls.num_elements(), false);
    for (std::size_t p : sorted) {
        cls.check_position(p);
        if (seen[p])
            throw InputError("shattering positions must be distinct");
        seen[p] = true;
    }
    if (cls.empty())
        return std::nullopt;
    const std::size_t k = sorted.size();
    if (k >= 63 || (std::size_t{1} << k) > cls.dedup().distinct)
        return std::nullopt;
    std::unordered_map<std::uint64_t, std::uint32_t> first_with_pattern;
    first_with_pattern.reserve(cls.num_concepts());
    for (std::size_t c = 0; c < cls.num_concepts(); ++c) {
        std::uint64_t pat = 0;
        for (std::size_t t = 0; t < k; ++t)
            if (cls.member(c, sorted[t]))
                pat |= std::uint64_t{1} << t;
        first_with_pattern.emplace(pat, static_cast<std::uint32_t>(c));
    }
    if (first_with_pattern.size() != (std::size_t{1} << k))
        return std::nullopt;
    ShatterWitness w;
    w.set = std::move(sorted);
    w.assignments.resize(std::size_t{1} << k);
    for (std::size_t mask = 0; mask < w.assignments.size(); ++mask)
        w.assignments[mask] = first_with_pattern.at(mask);
    return w;
}

namespace {

struct VcBest {
    std::vector<std::size_t> set;
    std::vector<std::uint32_t> assign;

    bool better_than(const VcBest& o) const {
        if (set.size() != o.set.size())
            return set.size() > o.set.size();
        return set < o.set;
    }
};

struct VcScanner {
    const ConceptClass& cls;
    std::vector<const BitRow*> rows; // per distinct id
    const std::vector<std::uint32_t>& representative;
    std::size_t n;
    int cap;
    std::uint64_t budget;

    VcScanner(const ConceptClass& c, std::uint64_t node_budget)
        : cls(c), representative(c.dedup().representative), n(c.num_elements()),
          cap(floor_log2(c.dedup().distinct)), budget(node_budget) {
        rows.reserve(representative.size());
        for (std::uint32_t r : representative)
            rows.push_back(&c.row(r));
    }

    bool extend(const std::vector<std::vector<std::uint32_t>>& groups, std::size_t x,
                std::vector<std::vector<std::uint32_t>>& out) const {
        out.assign(groups.size() * 2, {});
        for (std::size_t m = 0; m < groups.size(); ++m) {
            auto& g0 = out[m];
            auto& g1 = out[m + groups.size()];
            for (std::uint32_t id : groups[m])
                (rows[id]->get(x) ? g1 : g0).push_back(id);
            if (g0.empty() || g1.empty())
                return false;
        }
        return true;
    }

    void record(const std::vector<std::size_t>& set,
                const std::vector<std::vector<std::uint32_t>>& groups, VcBest& best) const {
        best.set = set;
        best.assign.resize(groups.size());
        for (std::size_t m = 0; m < groups.size(); ++m)
            best.assign[m] = representative[groups[m][0]];
    }

    void dfs(std::vector<std::size_t>& set, const std::vector<std::vector<std::uint32_t>>& groups,
             VcBest& best, std::uint64_t& explored) const {
        ++explored;
        if (budget && explored > budget)
            throw ResourceError("shattered-set scan exceeded node budget of " +
                                std::to_string(budget));
        if (set.size() > best.set.size())
            record(set, groups, best);
        if (static_cast<int>(set.size()) == cap)
            return;
        std::vector<std::vector<std::uint32_t>> child;
        for (std::size_t x = set.back() + 1; x < n; ++x) {
            if (!extend(groups, x, child))
                continue;
            set.push_back(x);
            dfs(set, child, best, explored);
            set.pop_back();
        }
    }
};

} // namespace

VcResult vc_dimension(const ConceptClass& cls, const DimOptions& opts) {
    VcResult res;
    if (cls.empty())
        return res;
    res.defined = true;

    VcScanner scan(cls, opts.node_budget);
    VcBest best;
    best.assign = {0}; // the empty set is shattered by any concept
    res.explored = 1;

    if (scan.cap > 0) {
        std::vector<std::uint32_t> all(cls.dedup().distinct);
        std::iota(all.begin(), all.end(), 0u);
        const std::vector<std::vector<std::uint32_t>> root{all};

        const int threads = opts.node_budget ? 1 : resolve_threads(opts.threads);
        std::vector<VcBest> bests(scan.n);
        std::vector<std::uint64_t> counts(scan.n, 0);
        std::exception_ptr err;

        #pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
        for (std::size_t x0 = 0; x0 < scan.n; ++x0) {
            try {
                std::vector<std::vector<std::uint32_t>> child;
                if (!scan.extend(root, x0, child))
                    continue;
                std::vector<std::size_t> set{x0};
                scan.dfs(set, child, bests[x0], counts[x0]);
            } catch (...) {
                #pragma omp critical
                if (!err)
                    err = std::current_exception();
            }
        }
        if (err)
            std::rethrow_exception(err);
        for (std::size_t x0 = 0; x0 < scan.n; ++x0) {
            res.explored += counts[x0];
            if (!bests[x0].assign.empty() && bests[x0].better_than(best))
                best = std::move(bests[x0]);
        }
    }

    res.dimension = static_cast<int>(best.set.size());
    res.witness.set = std::move(best.set);
    res.witness.assignments = std::move(best.assign);
    return res;
}

} // namespace ccdim
