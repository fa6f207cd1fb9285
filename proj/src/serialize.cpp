#include "ccdim/serialize.hpp"

#include <fstream>
#include <sstream>

namespace ccdim {

namespace {

std::string path_bits(int depth, std::uint64_t value, int length) {
    std::string s;
    for (int t = 0; t < length; ++t)
        s.push_back(((value >> (length - 1 - t)) & 1u) ? '1' : '0');
    (void)depth;
    return s;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write file: " + path);
    out << content;
}

void write_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

Json read_json_file(const std::string& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const Json::parse_error& e) {
        throw InputError("invalid JSON in " + path + ": " + e.what());
    }
}

Json witness_to_json(const ShatterWitness& w) {
    return Json{{"set", w.set}, {"assignments", w.assignments}};
}

ShatterWitness witness_from_json(const Json& j) {
    ShatterWitness w;
    w.set = j.at("set").get<std::vector<std::size_t>>();
    w.assignments = j.at("assignments").get<std::vector<std::uint32_t>>();
    if (w.set.size() >= 63 || w.assignments.size() != (std::size_t{1} << w.set.size()))
        throw InputError("witness assignments must cover all 2^|set| subsets");
    return w;
}

Json tree_to_json(const MistakeTree& t) {
    Json nodes = Json::object();
    for (int level = 0; level < t.depth; ++level)
        for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << level); ++prefix)
            nodes[path_bits(t.depth, prefix, level)] =
                t.node_elements[MistakeTree::node_slot(level, prefix)];
    Json leaves = Json::object();
    for (std::uint64_t leaf = 0; leaf < (std::uint64_t{1} << t.depth); ++leaf)
        leaves[path_bits(t.depth, leaf, t.depth)] = t.leaf_witnesses[leaf];
    return Json{{"depth", t.depth}, {"nodes", nodes}, {"leaves", leaves}};
}

MistakeTree tree_from_json(const Json& j) {
    MistakeTree t;
    t.depth = j.at("depth").get<int>();
    if (t.depth < 0 || t.depth > 30)
        throw InputError("mistake tree depth out of range");
    t.node_elements.assign((std::size_t{1} << t.depth) - 1, 0);
    t.leaf_witnesses.assign(std::size_t{1} << t.depth, 0);
    const Json& nodes = j.at("nodes");
    for (int level = 0; level < t.depth; ++level)
        for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << level); ++prefix) {
            const std::string key = path_bits(t.depth, prefix, level);
            if (!nodes.contains(key))
                throw InputError("mistake tree is missing node " + key);
            t.node_elements[MistakeTree::node_slot(level, prefix)] =
                nodes.at(key).get<std::size_t>();
        }
    const Json& leaves = j.at("leaves");
    for (std::uint64_t leaf = 0; leaf < (std::uint64_t{1} << t.depth); ++leaf) {
        const std::string key = path_bits(t.depth, leaf, t.depth);
        if (!leaves.contains(key))
            throw InputError("mistake tree is missing leaf " + key);
        t.leaf_witnesses[leaf] = leaves.at(key).get<std::uint32_t>();
    }
    return t;
}

Json transcript_to_json(const GameTranscript& t) {
    Json steps = Json::array();
    for (const auto& s : t.steps)
        steps.push_back(Json{{"element", s.element},
                             {"prediction", s.prediction ? 1 : 0},
                             {"answer", s.answer ? 1 : 0}});
    return Json{{"mistakes", t.mistakes}, {"steps", steps}};
}

GameTranscript transcript_from_json(const Json& j) {
    GameTranscript t;
    for (const auto& s : j.at("steps")) {
        GameStep step;
        step.element = s.at("element").get<std::size_t>();
        step.prediction = s.at("prediction").get<int>() != 0;
        step.answer = s.at("answer").get<int>() != 0;
        t.steps.push_back(step);
    }
    t.mistakes = j.at("mistakes").get<std::size_t>();
    std::size_t count = 0;
    for (const auto& s : t.steps)
        count += s.prediction != s.answer;
    if (count != t.mistakes)
        throw InputError("transcript mistake count does not match its steps");
    return t;
}

Json concept_class_to_json(const ConceptClass& cls) {
    std::vector<std::string> rows;
    rows.reserve(cls.num_concepts());
    for (std::size_t c = 0; c < cls.num_concepts(); ++c)
        rows.push_back(cls.row(c).to_string());
    Json j{{"element_labels", cls.universe().labels()}, {"rows", rows}};
    if (cls.has_concept_labels())
        j["concept_labels"] = cls.concept_labels();
    return j;
}

ConceptClass concept_class_from_json(const Json& j) {
    std::vector<std::string> labels = j.at("element_labels").get<std::vector<std::string>>();
    std::vector<std::string> rows = j.at("rows").get<std::vector<std::string>>();
    std::vector<std::string> concept_labels;
    if (j.contains("concept_labels"))
        concept_labels = j.at("concept_labels").get<std::vector<std::string>>();
    return ConceptClass::make(std::move(labels), rows, std::move(concept_labels));
}

Json label_cover_to_json(const LabelCoverInstance& inst) {
    Json edges = Json::array();
    for (const auto& e : inst.edges())
        edges.push_back(Json{{"a", inst.a_names()[e.a]},
                             {"b", inst.b_names()[e.b]},
                             {"pi", e.projection}});
    return Json{{"A", inst.a_names()},
                {"B", inst.b_names()},
                {"alphabet_size", inst.alphabet_size()},
                {"edges", edges}};
}

LabelCoverInstance label_cover_from_json(const Json& j) {
    auto a_names = j.at("A").get<std::vector<std::string>>();
    auto b_names = j.at("B").get<std::vector<std::string>>();
    const auto alphabet = j.at("alphabet_size").get<std::uint32_t>();
    std::unordered_map<std::string, std::uint32_t> a_index, b_index;
    for (std::uint32_t i = 0; i < a_names.size(); ++i)
        a_index[a_names[i]] = i;
    for (std::uint32_t i = 0; i < b_names.size(); ++i)
        b_index[b_names[i]] = i;
    std::vector<LabelCoverEdge> edges;
    for (const auto& e : j.at("edges")) {
        LabelCoverEdge edge;
        const auto a = e.at("a").get<std::string>();
        const auto b = e.at("b").get<std::string>();
        const auto ita = a_index.find(a);
        const auto itb = b_index.find(b);
        if (ita == a_index.end())
            throw InputError("edge references unknown A vertex: " + a);
        if (itb == b_index.end())
            throw InputError("edge references unknown B vertex: " + b);
        edge.a = ita->second;
        edge.b = itb->second;
        edge.projection = e.at("pi").get<std::vector<std::uint32_t>>();
        edges.push_back(std::move(edge));
    }
    return LabelCoverInstance::make(std::move(a_names), std::move(b_names), alphabet,
                                    std::move(edges));
}

Json partition_to_json(const BlockPartition& p) {
    return Json{{"r", p.r},
                {"seed", p.seed},
                {"attempts", p.attempts},
                {"chosen_attempt", p.chosen_attempt},
                {"block_of", p.block_of},
                {"blocks", p.blocks},
                {"neighbors_into", p.neighbors_into},
                {"quality",
                 Json{{"block_sizes", p.quality.block_sizes},
                      {"pair_edges", p.quality.pair_edges},
                      {"sizes_ok", p.quality.sizes_ok},
                      {"edges_ok", p.quality.edges_ok},
                      {"pass", p.quality.pass},
                      {"violations", p.quality.violations},
                      {"biregular", p.quality.biregular}}}};
}

BlockPartition partition_from_json(const Json& j) {
    BlockPartition p;
    p.r = j.at("r").get<std::uint32_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.attempts = j.at("attempts").get<std::uint32_t>();
    p.chosen_attempt = j.at("chosen_attempt").get<std::uint32_t>();
    p.block_of = j.at("block_of").get<std::vector<std::uint32_t>>();
    p.blocks = j.at("blocks").get<std::vector<std::vector<std::uint32_t>>>();
    p.neighbors_into =
        j.at("neighbors_into").get<std::vector<std::vector<std::vector<std::uint32_t>>>>();
    const Json& q = j.at("quality");
    p.quality.block_sizes = q.at("block_sizes").get<std::vector<std::size_t>>();
    p.quality.pair_edges = q.at("pair_edges").get<std::vector<std::vector<std::uint64_t>>>();
    p.quality.sizes_ok = q.at("sizes_ok").get<bool>();
    p.quality.edges_ok = q.at("edges_ok").get<bool>();
    p.quality.pass = q.at("pass").get<bool>();
    p.quality.violations = q.at("violations").get<std::uint32_t>();
    p.quality.biregular = q.at("biregular").get<bool>();
    return p;
}

Json plan_to_json(const TestPlan& p) {
    Json seeds = Json::array();
    for (const auto& s : p.seeds)
        seeds.push_back(Json{{"id", s.id},
                             {"perms", s.perms},
                             {"matched", s.matched},
                             {"tested_in_block", s.tested_in_block},
                             {"test_vertices", s.test_vertices}});
    return Json{{"r_eff", p.r_eff}, {"seeds", seeds}};
}

TestPlan plan_from_json(const Json& j) {
    TestPlan p;
    p.r_eff = j.at("r_eff").get<std::uint32_t>();
    for (const auto& s : j.at("seeds")) {
        SeedPlan sp;
        sp.id = s.at("id").get<std::uint64_t>();
        sp.perms = s.at("perms").get<std::vector<std::vector<std::uint32_t>>>();
        sp.matched = s.at("matched").get<std::vector<std::vector<std::uint32_t>>>();
        sp.tested_in_block =
            s.at("tested_in_block").get<std::vector<std::vector<std::uint32_t>>>();
        sp.test_vertices = s.at("test_vertices").get<std::vector<std::uint32_t>>();
        p.seeds.push_back(std::move(sp));
    }
    return p;
}

Json report_to_json(const AuditReport& r) {
    Json params = Json::object();
    for (const auto& [k, v] : r.params)
        params[k] = v;
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back(Json{{"name", c.name},
                              {"status", c.status},
                              {"observed", c.observed},
                              {"expected", c.expected},
                              {"details", c.details}});
    return Json{{"name", r.name}, {"params", params}, {"checks", checks},
                {"passed", r.passed()}};
}

Json reduction_meta_to_json(const ReductionOutput& out) {
    Json kinds = Json::array();
    for (const auto& k : out.element_kinds)
        kinds.push_back(Json{{"kind", k.is_assignment ? "x" : "y"},
                             {"block", k.block},
                             {"copy", k.copy},
                             {"sigma", k.sigma},
                             {"inclusion_mask", k.inclusion_mask}});
    Json concepts = Json::array();
    for (const auto& c : out.concept_meta)
        concepts.push_back(Json{{"i_mask", c.i_mask}, {"h_mask", c.h_mask}, {"sigma", c.sigma}});
    Json records = Json::array();
    for (const auto& rec : out.param_records)
        records.push_back(Json{{"name", rec.name},
                               {"formula_value", rec.formula_value},
                               {"used", rec.used},
                               {"clamped", rec.clamped}});
    return Json{{"mode", out.mode == ReductionMode::vc ? "vc" : "ls"},
                {"r", out.r},
                {"r_eff", out.r_eff},
                {"padded", out.padded},
                {"ell", out.ell},
                {"k", out.k},
                {"delta", out.delta},
                {"seed", out.seed},
                {"caps",
                 Json{{"max_universe", out.caps.max_universe},
                      {"max_concepts", out.caps.max_concepts},
                      {"max_rk", out.caps.max_rk},
                      {"max_ell", out.caps.max_ell},
                      {"max_k", out.caps.max_k},
                      {"max_matrix_bits", out.caps.max_matrix_bits},
                      {"partition_retries", out.caps.partition_retries}}},
                {"param_records", records},
                {"instance", label_cover_to_json(out.instance)},
                {"partition", partition_to_json(out.partition)},
                {"plan", plan_to_json(out.plan)},
                {"element_kinds", kinds},
                {"concepts", concepts}};
}

void save_reduction(const ReductionOutput& out, const std::string& base) {
    std::ostringstream cc;
    write_concept_class_text(out.cls, cc);
    write_text_file(base + ".cc", cc.str());
    write_json_file(base + ".meta.json", reduction_meta_to_json(out));
}

ReductionOutput load_reduction(const std::string& class_path, const std::string& meta_path) {
    const ConceptClass bare = load_concept_class(class_path);
    const Json j = read_json_file(meta_path);

    ReductionOutput out;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "vc")
        out.mode = ReductionMode::vc;
    else if (mode == "ls")
        out.mode = ReductionMode::ls;
    else
        throw InputError("unknown reduction mode: " + mode);
    out.r = j.at("r").get<std::uint32_t>();
    out.r_eff = j.at("r_eff").get<std::uint32_t>();
    out.padded = j.at("padded").get<bool>();
    out.ell = j.at("ell").get<std::int64_t>();
    out.k = j.at("k").get<std::int64_t>();
    out.delta = j.at("delta").get<double>();
    out.seed = j.at("seed").get<std::uint64_t>();
    const Json& caps = j.at("caps");
    out.caps.max_universe = caps.at("max_universe").get<std::uint64_t>();
    out.caps.max_concepts = caps.at("max_concepts").get<std::uint64_t>();
    out.caps.max_rk = caps.at("max_rk").get<std::uint32_t>();
    out.caps.max_ell = caps.at("max_ell").get<std::int64_t>();
    out.caps.max_k = caps.at("max_k").get<std::int64_t>();
    out.caps.max_matrix_bits = caps.at("max_matrix_bits").get<std::uint64_t>();
    out.caps.partition_retries = caps.at("partition_retries").get<std::uint32_t>();
    for (const auto& rec : j.at("param_records"))
        out.param_records.push_back({rec.at("name").get<std::string>(),
                                     rec.at("formula_value").get<std::string>(),
                                     rec.at("used").get<std::int64_t>(),
                                     rec.at("clamped").get<bool>()});
    out.instance = label_cover_from_json(j.at("instance"));
    out.partition = partition_from_json(j.at("partition"));
    out.plan = plan_from_json(j.at("plan"));
    for (const auto& k : j.at("element_kinds")) {
        ElementKind kind;
        kind.is_assignment = k.at("kind").get<std::string>() == "x";
        kind.block = k.at("block").get<std::uint32_t>();
        kind.copy = k.at("copy").get<std::int64_t>();
        kind.sigma = k.at("sigma").get<std::string>();
        kind.inclusion_mask = k.at("inclusion_mask").get<std::uint64_t>();
        out.element_kinds.push_back(std::move(kind));
    }
    std::vector<std::string> concept_labels;
    for (const auto& c : j.at("concepts")) {
        ConceptMeta meta{c.at("i_mask").get<std::uint64_t>(), c.at("h_mask").get<std::uint64_t>(),
                         c.at("sigma").get<std::string>()};
        concept_labels.push_back("c:" + std::to_string(meta.i_mask) + ":" +
                                 std::to_string(meta.h_mask) + ":" + meta.sigma);
        out.concept_meta.push_back(std::move(meta));
    }

    if (out.element_kinds.size() != bare.num_elements())
        throw InputError("meta element_kinds do not match the class file");
    if (out.concept_meta.size() != bare.num_concepts())
        throw InputError("meta concepts do not match the class file");
    for (std::size_t pos = 0; pos < bare.num_elements(); ++pos) {
        const ElementKind& kind = out.element_kinds[pos];
        std::string expect;
        if (kind.is_assignment) {
            expect = "x:" + std::to_string(kind.block + 1) + ":" + kind.sigma;
            if (kind.copy >= 0)
                expect += ":" + std::to_string(kind.copy + 1);
        } else if (out.mode == ReductionMode::vc) {
            expect = "y:" + std::to_string(kind.block + 1);
        } else {
            expect = "y:" + std::to_string(kind.block + 1) + ":" +
                     std::to_string(kind.inclusion_mask) + ":" + std::to_string(kind.copy + 1);
        }
        if (bare.universe().label(pos) != expect)
            throw InputError("element label mismatch between class file and meta at position " +
                             std::to_string(pos));
    }

    std::vector<BitRow> rows = bare.rows();
    out.cls = ConceptClass::make(bare.universe().labels(), std::move(rows),
                                 std::move(concept_labels));
    return out;
}

ConceptClass load_concept_class(const std::string& path) {
    if (ends_with(path, ".json"))
        return concept_class_from_json(read_json_file(path));
    std::istringstream in(read_text_file(path));
    try {
        return parse_concept_class_text(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void save_concept_class(const ConceptClass& cls, const std::string& path) {
    if (ends_with(path, ".json")) {
        write_json_file(path, concept_class_to_json(cls));
        return;
    }
    std::ostringstream out;
    write_concept_class_text(cls, out);
    write_text_file(path, out.str());
}

LabelCoverInstance load_label_cover(const std::string& path) {
    return label_cover_from_json(read_json_file(path));
}

void save_label_cover(const LabelCoverInstance& inst, const std::string& path) {
    write_json_file(path, label_cover_to_json(inst));
}

} // namespace ccdim
