#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccdim/bitrow.hpp"
#include "ccdim/errors.hpp"

namespace ccdim {

// Ordered ground set. Labels are for I/O only; every algorithm works on
// positions 0..size()-1.
class Universe {
public:
    static Universe make(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t pos) const { return labels_[pos]; }

    std::optional<std::size_t> find(const std::string& label) const;
    std::size_t position(const std::string& label) const; // throws InputError if absent

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Identical membership rows grouped; duplicates are legal (multiset
// semantics) but always reported.
struct DedupReport {
    std::size_t distinct = 0;
    std::vector<std::uint32_t> distinct_id;               // per concept
    std::vector<std::uint32_t> representative;            // per distinct id: first concept with that row
    std::vector<std::vector<std::uint32_t>> duplicate_groups; // only groups of size >= 2
};

// A partial labeling of universe positions; the domain positions are distinct.
class LabeledAssignment {
public:
    LabeledAssignment() = default;
    static LabeledAssignment make(std::vector<std::pair<std::size_t, bool>> pairs,
                                  std::size_t universe_size);

    const std::vector<std::pair<std::size_t, bool>>& pairs() const { return pairs_; }
    bool empty() const { return pairs_.empty(); }

private:
    std::vector<std::pair<std::size_t, bool>> pairs_; // sorted by position
};

// Explicit concept class: a binary membership matrix over a universe.
// Immutable after construction; all operations return new values.
class ConceptClass {
public:
    ConceptClass() : universe_(std::make_shared<Universe>()) {}

    static ConceptClass make(std::vector<std::string> element_labels,
                             std::vector<BitRow> rows,
                             std::vector<std::string> concept_labels = {});
    static ConceptClass make(std::vector<std::string> element_labels,
                             const std::vector<std::string>& row_strings,
                             std::vector<std::string> concept_labels = {});

    const Universe& universe() const { return *universe_; }
    std::size_t num_elements() const { return universe_->size(); }
    std::size_t num_concepts() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    bool member(std::size_t concept_idx, std::size_t element) const {
        return rows_[concept_idx].get(element);
    }
    const BitRow& row(std::size_t concept_idx) const { return rows_[concept_idx]; }
    const std::vector<BitRow>& rows() const { return rows_; }

    const std::vector<std::string>& concept_labels() const { return concept_labels_; }
    bool has_concept_labels() const { return !concept_labels_.empty(); }

    const DedupReport& dedup() const { return dedup_; }

    // Subclass of concepts whose bit at `element` equals `bit`; same universe.
    ConceptClass restricted(std::size_t element, bool bit) const;

    // Distinct restrictions {C ∩ S : C in class}, sorted lexicographically.
    // Positions in S must be distinct and valid.
    std::vector<BitRow> trace(std::span<const std::size_t> positions) const;

    // Subclass of concepts agreeing with every (position, bit) pair.
    ConceptClass agreeing_with(const LabeledAssignment& rho) const;

    // Indices of kept concepts, for callers that need the mapping.
    std::vector<std::uint32_t> agreeing_indices(const LabeledAssignment& rho) const;

    void check_position(std::size_t element) const;

private:
    ConceptClass(std::shared_ptr<const Universe> u, std::vector<BitRow> rows,
                 std::vector<std::string> concept_labels);
    void build_dedup();

    std::shared_ptr<const Universe> universe_;
    std::vector<BitRow> rows_;
    std::vector<std::string> concept_labels_;
    DedupReport dedup_;
};

// Shattering certificate: assignments[m] is a concept realizing the subset
// {set[t] : bit t of m is 1} as its intersection with `set`.
struct ShatterWitness {
    std::vector<std::size_t> set; // ascending positions
    std::vector<std::uint32_t> assignments; // 2^|set| entries indexed by subset mask
};

bool check_witness(const ConceptClass& cls, const ShatterWitness& w);

// Bit-matrix text format:
//   line 1: n_elements n_concepts
//   line 2: whitespace-separated element labels
//   then one 0/1 row string per concept.
ConceptClass parse_concept_class_text(std::istream& in);
void write_concept_class_text(const ConceptClass& cls, std::ostream& out);

} // namespace ccdim
