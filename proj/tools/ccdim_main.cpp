#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ccdim/dimensions.hpp"
#include "ccdim/errors.hpp"
#include "ccdim/reductions.hpp"
#include "ccdim/rng.hpp"
#include "ccdim/serialize.hpp"
#include "ccdim/verify.hpp"

namespace {

using namespace ccdim;

void kv(const std::string& key, const std::string& value) {
    std::cout << key << "=" << value << "\n";
}
void kv(const std::string& key, std::uint64_t value) { kv(key, std::to_string(value)); }
void kv(const std::string& key, std::int64_t value) { kv(key, std::to_string(value)); }
void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
void kv(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    kv(key, std::string(buf));
}
void kv(const std::string& key, bool value) { kv(key, std::string(value ? "true" : "false")); }

void print_report(const AuditReport& rep) {
    for (const auto& [k, v] : rep.params)
        kv("config." + k, v);
    for (const auto& c : rep.checks) {
        kv("check." + c.name, c.status);
        if (!c.observed.empty())
            kv("observed." + c.name, c.observed);
        if (!c.expected.empty())
            kv("expected." + c.name, c.expected);
        if (!c.details.empty())
            kv("details." + c.name, c.details);
    }
}

struct DimArgs {
    std::string input;
    std::string out;
    int threads = 1;
};

int run_dim_vc(const DimArgs& a) {
    kv("config.command", std::string("dim.vc"));
    kv("config.input", a.input);
    kv("config.threads", a.threads);
    const ConceptClass cls = load_concept_class(a.input);
    DimOptions opts;
    opts.threads = a.threads;
    const VcResult res = vc_dimension(cls, opts);
    if (!res.defined) {
        kv("vc", std::string("undefined"));
        kv("status", std::string("ok"));
        return 0;
    }
    kv("vc", res.dimension);
    kv("explored", res.explored);
    const std::string out = a.out.empty() ? a.input + ".vc-witness.json" : a.out;
    write_json_file(out, witness_to_json(res.witness));
    kv("witness", out);
    kv("status", std::string("ok"));
    return 0;
}

int run_dim_ls(const DimArgs& a) {
    kv("config.command", std::string("dim.ls"));
    kv("config.input", a.input);
    kv("config.threads", a.threads);
    const ConceptClass cls = load_concept_class(a.input);
    DimOptions opts;
    opts.threads = a.threads;
    const LsResult res = ls_dimension(cls, opts);
    if (!res.defined) {
        kv("ls", std::string("undefined"));
        kv("status", std::string("ok"));
        return 0;
    }
    kv("ls", res.dimension);
    kv("nodes", res.nodes);
    const std::string out = a.out.empty() ? a.input + ".ls-tree.json" : a.out;
    write_json_file(out, tree_to_json(res.tree));
    kv("tree", out);
    kv("status", std::string("ok"));
    return 0;
}

struct GameArgs {
    std::string input;
    std::string out;
    std::int64_t target = -1;
    bool adversary = false;
    std::uint64_t seed = 0;
    bool seeded = false;
    std::uint64_t max_steps = 0;
    int threads = 1;
};

int run_game(const GameArgs& a) {
    kv("config.command", std::string("game"));
    kv("config.input", a.input);
    kv("config.mode", std::string(a.adversary ? "adversary" : "target"));
    if (!a.adversary)
        kv("config.target", a.target);
    if (a.seeded)
        kv("config.seed", a.seed);
    const ConceptClass cls = load_concept_class(a.input);
    GameConfig cfg;
    cfg.threads = a.threads;
    cfg.adversary = a.adversary;
    if (!a.adversary) {
        if (a.target < 0)
            throw InputError("choose exactly one of --target / --adversary");
        cfg.target = static_cast<std::uint32_t>(a.target);
        cfg.order.resize(cls.num_elements());
        for (std::size_t i = 0; i < cfg.order.size(); ++i)
            cfg.order[i] = i;
        if (a.seeded) {
            Rng rng(derive_stream(a.seed, /*tag=*/7, 0));
            rng.shuffle(cfg.order);
        }
    }
    if (a.max_steps)
        cfg.max_steps = a.max_steps;
    const GameTranscript t = run_online_game(cls, cfg);
    kv("steps", static_cast<std::uint64_t>(t.steps.size()));
    kv("mistakes", static_cast<std::uint64_t>(t.mistakes));
    if (!a.out.empty()) {
        write_json_file(a.out, transcript_to_json(t));
        kv("transcript", a.out);
    }
    kv("status", std::string("ok"));
    return 0;
}

struct ReduceArgs {
    std::string input;
    std::string out;
    ReductionParams params;
};

int run_reduce(const ReduceArgs& a, ReductionMode mode) {
    kv("config.command", std::string(mode == ReductionMode::vc ? "reduce.vc" : "reduce.ls"));
    kv("config.input", a.input);
    kv("config.r", static_cast<std::uint64_t>(a.params.r));
    kv("config.delta", a.params.delta);
    kv("config.ell", a.params.ell);
    if (mode == ReductionMode::ls)
        kv("config.k", a.params.k);
    kv("config.seed", a.params.seed);
    kv("config.max_universe", a.params.caps.max_universe);
    kv("config.max_concepts", a.params.caps.max_concepts);
    kv("config.max_rk", static_cast<std::uint64_t>(a.params.caps.max_rk));
    kv("config.out", a.out);
    const LabelCoverInstance inst = load_label_cover(a.input);
    const ReductionOutput out = mode == ReductionMode::vc ? vc_reduction(inst, a.params)
                                                          : ls_reduction(inst, a.params);
    for (const auto& rec : out.param_records) {
        kv("param." + rec.name + ".formula", rec.formula_value);
        kv("param." + rec.name + ".used", rec.used);
        kv("param." + rec.name + ".clamped", rec.clamped);
    }
    kv("r_eff", static_cast<std::uint64_t>(out.r_eff));
    kv("padded", out.padded);
    kv("universe", static_cast<std::uint64_t>(out.cls.num_elements()));
    kv("concepts", static_cast<std::uint64_t>(out.cls.num_concepts()));
    kv("distinct", static_cast<std::uint64_t>(out.cls.dedup().distinct));
    kv("partition.pass", out.partition.quality.pass);
    kv("partition.violations", static_cast<std::uint64_t>(out.partition.quality.violations));
    save_reduction(out, a.out);
    kv("out.class", a.out + ".cc");
    kv("out.meta", a.out + ".meta.json");
    kv("status", std::string("ok"));
    return 0;
}

struct FactsArgs {
    std::string input;
    std::string report;
    FactsOptions opts;
};

int run_verify_facts(const FactsArgs& a) {
    kv("config.command", std::string("verify.facts"));
    kv("config.input", a.input);
    const ConceptClass cls = load_concept_class(a.input);
    const AuditReport rep = check_dimension_facts(cls, a.opts);
    print_report(rep);
    if (!a.report.empty()) {
        write_json_file(a.report, report_to_json(rep));
        kv("report", a.report);
    }
    kv("result", std::string(rep.passed() ? "pass" : "fail"));
    return rep.passed() ? 0 : 1;
}

struct CertificateArgs {
    std::string class_path;
    std::string meta_path;
    double opt_log2 = 40.0;
    std::uint64_t opt_work = std::uint64_t{1} << 33;
};

int run_verify_certificate(const CertificateArgs& a) {
    kv("config.command", std::string("verify.certificate"));
    kv("config.class", a.class_path);
    kv("config.meta", a.meta_path);
    const ReductionOutput out = load_reduction(a.class_path, a.meta_path);
    const OptimumBudget budget{a.opt_log2, a.opt_work};
    const OptimumResult opt = brute_force_optimum(out.instance, budget);
    kv("optimum", opt.val.to_double());
    if (!opt.satisfiable())
        throw InputError("instance is not satisfiable; completeness certificate undefined");
    bool ok = false;
    if (out.mode == ReductionMode::vc) {
        const auto set = vc_completeness_certificate(out, opt.assignment);
        kv("certificate.size", static_cast<std::uint64_t>(set.size()));
        kv("certificate.expected_size", static_cast<std::uint64_t>(2 * out.r_eff));
        const auto witness = is_shattered(out.cls, set);
        ok = witness.has_value() && set.size() == 2 * out.r_eff &&
             check_witness(out.cls, *witness);
        kv("shattered", witness.has_value());
    } else {
        const MistakeTree tree = ls_completeness_tree(out, opt.assignment);
        kv("tree.depth", tree.depth);
        kv("tree.expected_depth",
           static_cast<std::uint64_t>(2 * out.r_eff * static_cast<std::uint64_t>(out.k)));
        ok = verify_mistake_tree(out.cls, tree) &&
             tree.depth == static_cast<int>(2 * out.r_eff * out.k);
        kv("tree.verified", ok);
    }
    kv("result", std::string(ok ? "pass" : "fail"));
    return ok ? 0 : 1;
}

struct Lemma36Args {
    std::string input;
    std::uint32_t r = 8;
    double delta = 0.0;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::uint32_t retries = 100;
    double opt_log2 = 40.0;
    std::uint64_t opt_work = std::uint64_t{1} << 33;
};

int run_verify_lemma36(const Lemma36Args& a) {
    kv("config.command", std::string("verify.lemma36"));
    kv("config.input", a.input);
    kv("config.r", static_cast<std::uint64_t>(a.r));
    kv("config.trials", a.trials);
    kv("config.seed", a.seed);
    kv("config.delta", a.delta);
    const LabelCoverInstance inst = load_label_cover(a.input);
    const BlockPartition partition =
        partition_blocks(inst, a.r, derive_stream(a.seed, 1, 0), a.retries);
    std::vector<std::uint32_t> blocks(a.r);
    for (std::uint32_t i = 0; i < a.r; ++i)
        blocks[i] = i;
    const OptimumBudget budget{a.opt_log2, a.opt_work};
    const OptimumResult opt = brute_force_optimum(inst, budget);
    kv("optimum", opt.val.to_double());
    const PassEstimate est = estimate_pass_probability(inst, partition, blocks, opt.assignment,
                                                       a.trials, a.seed, a.delta, a.threads,
                                                       budget);
    kv("estimate", est.estimate);
    kv("std_error", est.std_error);
    kv("delta.effective", est.delta);
    kv("bound", est.bound);
    kv("bound.applicable", est.bound_applicable);
    kv("note", est.note);
    if (!est.bound_applicable) {
        kv("result", std::string("skipped"));
        return 0;
    }
    const bool ok = est.estimate <= est.bound + 3.0 * est.std_error;
    kv("result", std::string(ok ? "pass" : "fail"));
    return ok ? 0 : 1;
}

struct SearchArgs {
    std::string class_path;
    std::string meta_path;
    std::string witness_out;
    std::string report;
    std::uint64_t budget = 10000;
};

int run_verify_search(const SearchArgs& a) {
    kv("config.command", std::string("verify.search"));
    kv("config.class", a.class_path);
    kv("config.meta", a.meta_path);
    kv("config.budget", a.budget);
    const ReductionOutput out = load_reduction(a.class_path, a.meta_path);
    const SearchOutcome res = shattered_search(out, a.budget);
    kv("best_size", static_cast<std::uint64_t>(res.best_set.size()));
    kv("explored", res.explored);
    kv("budget_exhausted", res.budget_exhausted);
    kv("sets_checked", res.sets_checked);
    kv("seed_bound_violations", res.seed_bound_violations);
    for (const auto& d : res.violation_details)
        kv("violation", d);
    if (!a.witness_out.empty()) {
        write_json_file(a.witness_out, witness_to_json(res.witness));
        kv("witness", a.witness_out);
    }
    if (!a.report.empty()) {
        AuditReport rep;
        rep.name = "shattered_search";
        rep.params = {{"budget", std::to_string(a.budget)},
                      {"class", a.class_path},
                      {"meta", a.meta_path}};
        rep.checks.push_back({"seed_count_lower_bound",
                              res.seed_bound_violations == 0 ? "pass" : "fail",
                              "violations=" + std::to_string(res.seed_bound_violations),
                              "0 violations",
                              "checked " + std::to_string(res.sets_checked) + " shattered sets"});
        write_json_file(a.report, report_to_json(rep));
        kv("report", a.report);
    }
    const bool ok = res.seed_bound_violations == 0;
    kv("result", std::string(ok ? "pass" : "fail"));
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact dimension computation, online games, and randomized "
                 "constraint-graph constructions over explicit concept classes"};
    app.require_subcommand(1);

    std::function<int()> action;

    auto* dim = app.add_subcommand("dim", "exact dimensions of a concept class");
    dim->require_subcommand(1);
    static DimArgs dim_args;
    auto add_dim = [&](const char* name, const char* desc, int (*fn)(const DimArgs&)) {
        auto* sub = dim->add_subcommand(name, desc);
        sub->add_option("input", dim_args.input, "concept class file")->required();
        sub->add_option("--out", dim_args.out, "certificate output path");
        sub->add_option("--threads", dim_args.threads, "worker threads (0 = all)");
        sub->callback([fn, &action] { action = [fn] { return fn(dim_args); }; });
    };
    add_dim("vc", "largest shattered set", run_dim_vc);
    add_dim("ls", "largest mistake-tree depth", run_dim_ls);

    static GameArgs game_args;
    auto* game = app.add_subcommand("game", "play the online prediction game");
    game->add_option("input", game_args.input, "concept class file")->required();
    auto* target_opt = game->add_option("--target", game_args.target, "target concept index");
    game->add_flag("--adversary", game_args.adversary, "play against the optimal adversary");
    auto* seed_opt = game->add_option("--seed", game_args.seed, "shuffle the element order");
    game->add_option("--max-steps", game_args.max_steps, "stop after this many steps");
    game->add_option("--out", game_args.out, "transcript output path");
    game->add_option("--threads", game_args.threads, "worker threads");
    game->callback([target_opt, seed_opt, &action] {
        game_args.seeded = seed_opt->count() > 0;
        if (target_opt->count() == 0)
            game_args.target = -1;
        action = [] { return run_game(game_args); };
    });

    auto* reduce =
        app.add_subcommand("reduce", "generate a concept class from a constraint graph");
    reduce->require_subcommand(1);
    static ReduceArgs red_args;
    auto add_reduce = [&](const char* name, const char* desc, ReductionMode mode) {
        auto* sub = reduce->add_subcommand(name, desc);
        sub->add_option("input", red_args.input, "constraint graph file")->required();
        sub->add_option("--r", red_args.params.r, "block count (0 = default)");
        sub->add_option("--delta", red_args.params.delta, "gap parameter");
        sub->add_option("--ell", red_args.params.ell, "matchings per seed set (0 = default)");
        if (mode == ReductionMode::ls)
            sub->add_option("--k", red_args.params.k, "copies per block (0 = default)");
        sub->add_option("--seed", red_args.params.seed, "generation seed");
        sub->add_option("--out", red_args.out, "output base path")->required();
        sub->add_option("--max-universe", red_args.params.caps.max_universe, "universe cap");
        sub->add_option("--max-concepts", red_args.params.caps.max_concepts, "concept cap");
        sub->add_option("--max-rk", red_args.params.caps.max_rk, "r*k cap");
        sub->add_option("--max-ell", red_args.params.caps.max_ell, "matching cap");
        sub->add_option("--max-k", red_args.params.caps.max_k, "copy cap");
        sub->add_option("--retries", red_args.params.caps.partition_retries,
                        "partition retry cap");
        sub->callback(
            [mode, &action] { action = [mode] { return run_reduce(red_args, mode); }; });
    };
    add_reduce("vc", "shattering construction", ReductionMode::vc);
    add_reduce("ls", "online-game construction", ReductionMode::ls);

    auto* verify = app.add_subcommand("verify", "audits and certificate checks");
    verify->require_subcommand(1);

    static FactsArgs facts_args;
    auto* facts = verify->add_subcommand("facts", "dimension inequalities on a class");
    facts->add_option("input", facts_args.input, "concept class file")->required();
    facts->add_option("--seed", facts_args.opts.seed, "bipartition sampling seed");
    facts->add_option("--bipartitions", facts_args.opts.bipartitions, "bipartition samples");
    facts->add_option("--budget", facts_args.opts.node_budget, "recursion node budget");
    facts->add_option("--threads", facts_args.opts.threads, "worker threads");
    facts->add_option("--report", facts_args.report, "report output path");
    facts->callback([&action] { action = [] { return run_verify_facts(facts_args); }; });

    static CertificateArgs cert_args;
    auto* cert = verify->add_subcommand("certificate",
                                        "completeness certificate of a generated class");
    cert->add_option("class", cert_args.class_path, "generated class file")->required();
    cert->add_option("meta", cert_args.meta_path, "generation sidecar")->required();
    cert->add_option("--opt-log2", cert_args.opt_log2, "optimum search space budget (log2)");
    cert->add_option("--opt-work", cert_args.opt_work, "optimum enumeration work cap");
    cert->callback([&action] { action = [] { return run_verify_certificate(cert_args); }; });

    static Lemma36Args lem_args;
    auto* lem = verify->add_subcommand(
        "lemma36", "Monte-Carlo estimate of the single-matching pass probability");
    lem->add_option("input", lem_args.input, "constraint graph file")->required();
    lem->add_option("--r", lem_args.r, "block count");
    lem->add_option("--delta", lem_args.delta, "gap parameter (0 = derive from |I|/r)");
    lem->add_option("--trials", lem_args.trials, "Monte-Carlo trials");
    lem->add_option("--seed", lem_args.seed, "sampling seed");
    lem->add_option("--threads", lem_args.threads, "worker threads");
    lem->add_option("--retries", lem_args.retries, "partition retry cap");
    lem->add_option("--opt-log2", lem_args.opt_log2, "optimum search space budget (log2)");
    lem->add_option("--opt-work", lem_args.opt_work, "optimum enumeration work cap");
    lem->callback([&action] { action = [] { return run_verify_lemma36(lem_args); }; });

    static SearchArgs search_args;
    auto* search = verify->add_subcommand("search", "budgeted shattered-set search with audits");
    search->add_option("class", search_args.class_path, "generated class file")->required();
    search->add_option("meta", search_args.meta_path, "generation sidecar")->required();
    search->add_option("--budget", search_args.budget, "explored-node budget");
    search->add_option("--witness-out", search_args.witness_out, "witness output path");
    search->add_option("--report", search_args.report, "report output path");
    search->callback([&action] { action = [] { return run_verify_search(search_args); }; });

    try {
        app.parse(argc, argv);
        return action ? action() : 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cout << "error.kind=input\n";
        std::cout << "error.message=" << e.what() << "\n";
        return 2;
    } catch (const ccdim::ResourceError& e) {
        std::cout << "error.kind=resource\n";
        std::cout << "error.message=" << e.what() << "\n";
        return 3;
    } catch (const ccdim::ProtocolError& e) {
        std::cout << "error.kind=protocol\n";
        std::cout << "error.message=" << e.what() << "\n";
        return 2;
    } catch (const ccdim::InputError& e) {
        std::cout << "error.kind=input\n";
        std::cout << "error.message=" << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << "error.kind=internal\n";
        std::cout << "error.message=" << e.what() << "\n";
        return 2;
    }
}
