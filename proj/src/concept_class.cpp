#include "ccdim/concept_class.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace ccdim {

Universe Universe::make(std::vector<std::string> labels) {
    Universe u;
    u.index_.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = u.index_.emplace(labels[i], i);
        if (!inserted)
            throw InputError("duplicate element label: " + labels[i]);
    }
    u.labels_ = std::move(labels);
    return u;
}

std::optional<std::size_t> Universe::find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t Universe::position(const std::string& label) const {
    auto p = find(label);
    if (!p)
        throw InputError("unknown element label: " + label);
    return *p;
}

LabeledAssignment LabeledAssignment::make(std::vector<std::pair<std::size_t, bool>> pairs,
                                          std::size_t universe_size) {
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].first >= universe_size)
            throw InputError("assignment position out of range");
        if (i > 0 && pairs[i].first == pairs[i - 1].first)
            throw InputError("assignment domain positions must be distinct");
    }
    LabeledAssignment a;
    a.pairs_ = std::move(pairs);
    return a;
}

ConceptClass::ConceptClass(std::shared_ptr<const Universe> u, std::vector<BitRow> rows,
                           std::vector<std::string> concept_labels)
    : universe_(std::move(u)), rows_(std::move(rows)), concept_labels_(std::move(concept_labels)) {
    build_dedup();
}

ConceptClass ConceptClass::make(std::vector<std::string> element_labels,
                                std::vector<BitRow> rows,
                                std::vector<std::string> concept_labels) {
    auto u = std::make_shared<Universe>(Universe::make(std::move(element_labels)));
    for (const auto& r : rows)
        if (r.size() != u->size())
            throw InputError("row length does not match number of elements");
    if (!concept_labels.empty() && concept_labels.size() != rows.size())
        throw InputError("concept label count does not match row count");
    return ConceptClass(std::move(u), std::move(rows), std::move(concept_labels));
}

ConceptClass ConceptClass::make(std::vector<std::string> element_labels,
                                const std::vector<std::string>& row_strings,
                                std::vector<std::string> concept_labels) {
    std::vector<BitRow> rows;
    rows.reserve(row_strings.size());
    for (const auto& s : row_strings)
        rows.push_back(BitRow::from_string(s));
    return make(std::move(element_labels), std::move(rows), std::move(concept_labels));
}

void ConceptClass::build_dedup() {
    dedup_.distinct_id.assign(rows_.size(), 0);
    std::unordered_map<BitRow, std::uint32_t, BitRowHash> seen;
    seen.reserve(rows_.size());
    std::vector<std::vector<std::uint32_t>> groups;
    for (std::size_t c = 0; c < rows_.size(); ++c) {
        auto [it, inserted] = seen.emplace(rows_[c], static_cast<std::uint32_t>(groups.size()));
        if (inserted) {
            dedup_.representative.push_back(static_cast<std::uint32_t>(c));
            groups.emplace_back();
        }
        dedup_.distinct_id[c] = it->second;
        groups[it->second].push_back(static_cast<std::uint32_t>(c));
    }
    dedup_.distinct = groups.size();
    for (auto& g : groups)
        if (g.size() >= 2)
            dedup_.duplicate_groups.push_back(std::move(g));
}

void ConceptClass::check_position(std::size_t element) const {
    if (element >= universe_->size())
        throw InputError("element position out of range");
}

ConceptClass ConceptClass::restricted(std::size_t element, bool bit) const {
    check_position(element);
    std::vector<BitRow> kept;
    std::vector<std::string> kept_labels;
    for (std::size_t c = 0; c < rows_.size(); ++c) {
        if (rows_[c].get(element) == bit) {
            kept.push_back(rows_[c]);
            if (has_concept_labels())
                kept_labels.push_back(concept_labels_[c]);
        }
    }
    return ConceptClass(universe_, std::move(kept), std::move(kept_labels));
}

std::vector<BitRow> ConceptClass::trace(std::span<const std::size_t> positions) const {
    std::vector<bool> used(universe_->size(), false);
    for (std::size_t p : positions) {
        check_position(p);
        if (used[p])
            throw InputError("trace positions must be distinct");
        used[p] = true;
    }
    std::unordered_set<BitRow, BitRowHash> patterns;
    for (const auto& r : rows_) {
        BitRow pat(positions.size());
        for (std::size_t t = 0; t < positions.size(); ++t)
            pat.set(t, r.get(positions[t]));
        patterns.insert(std::move(pat));
    }
    std::vector<BitRow> out(patterns.begin(), patterns.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint32_t> ConceptClass::agreeing_indices(const LabeledAssignment& rho) const {
    for (const auto& [pos, bit] : rho.pairs())
        check_position(pos);
    std::vector<std::uint32_t> kept;
    for (std::size_t c = 0; c < rows_.size(); ++c) {
        bool ok = true;
        for (const auto& [pos, bit] : rho.pairs()) {
            if (rows_[c].get(pos) != bit) {
                ok = false;
                break;
            }
        }
        if (ok)
            kept.push_back(static_cast<std::uint32_t>(c));
    }
    return kept;
}

ConceptClass ConceptClass::agreeing_with(const LabeledAssignment& rho) const {
    auto kept = agreeing_indices(rho);
    std::vector<BitRow> rows;
    std::vector<std::string> labels;
    rows.reserve(kept.size());
    for (std::uint32_t c : kept) {
        rows.push_back(rows_[c]);
        if (has_concept_labels())
            labels.push_back(concept_labels_[c]);
    }
    return ConceptClass(universe_, std::move(rows), std::move(labels));
}

bool check_witness(const ConceptClass& cls, const ShatterWitness& w) {
    if (w.set.size() >= 63)
        return false;
    if (w.assignments.size() != (std::size_t{1} << w.set.size()))
        return false;
    for (std::size_t t = 0; t < w.set.size(); ++t) {
        if (w.set[t] >= cls.num_elements())
            return false;
        if (t > 0 && w.set[t] <= w.set[t - 1])
            return false;
    }
    for (std::size_t mask = 0; mask < w.assignments.size(); ++mask) {
        const std::uint32_t c = w.assignments[mask];
        if (c >= cls.num_concepts())
            return false;
        for (std::size_t t = 0; t < w.set.size(); ++t)
            if (cls.member(c, w.set[t]) != (((mask >> t) & 1u) != 0))
                return false;
    }
    return true;
}

ConceptClass parse_concept_class_text(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw InputError("concept class file: missing header line");
    std::istringstream head(line);
    long long n_elements = -1, n_concepts = -1;
    if (!(head >> n_elements >> n_concepts) || n_elements < 0 || n_concepts < 0)
        throw InputError("concept class file: header must be 'n_elements n_concepts'");

    if (!std::getline(in, line))
        throw InputError("concept class file: missing element label line");
    std::istringstream labs(line);
    std::vector<std::string> labels;
    std::string tok;
    while (labs >> tok)
        labels.push_back(tok);
    if (static_cast<long long>(labels.size()) != n_elements)
        throw InputError("concept class file: label count does not match n_elements");

    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(n_concepts));
    while (static_cast<long long>(rows.size()) < n_concepts) {
        if (!std::getline(in, line))
            throw InputError("concept class file: fewer rows than n_concepts");
        if (line.empty())
            continue;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (static_cast<long long>(line.size()) != n_elements)
            throw InputError("concept class file: row length does not match n_elements");
        rows.push_back(line);
    }
    return ConceptClass::make(std::move(labels), rows);
}

void write_concept_class_text(const ConceptClass& cls, std::ostream& out) {
    out << cls.num_elements() << ' ' << cls.num_concepts() << '\n';
    const auto& labels = cls.universe().labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i)
            out << ' ';
        out << labels[i];
    }
    out << '\n';
    for (std::size_t c = 0; c < cls.num_concepts(); ++c)
        out << cls.row(c).to_string() << '\n';
}

} // namespace ccdim
