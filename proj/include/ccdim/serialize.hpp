#pragma once

#include <string>

#include <json.hpp>

#include "ccdim/concept_class.hpp"
#include "ccdim/dimensions.hpp"
#include "ccdim/label_cover.hpp"
#include "ccdim/reductions.hpp"
#include "ccdim/verify.hpp"

namespace ccdim {

using Json = nlohmann::json;

// All JSON emitted here has alphabetically ordered keys and a stable layout,
// so equal inputs give byte-identical files.

Json witness_to_json(const ShatterWitness& w);
ShatterWitness witness_from_json(const Json& j);

Json tree_to_json(const MistakeTree& t);
MistakeTree tree_from_json(const Json& j);

Json transcript_to_json(const GameTranscript& t);
GameTranscript transcript_from_json(const Json& j);

Json concept_class_to_json(const ConceptClass& cls);
ConceptClass concept_class_from_json(const Json& j);

Json label_cover_to_json(const LabelCoverInstance& inst);
LabelCoverInstance label_cover_from_json(const Json& j);

Json partition_to_json(const BlockPartition& p);
BlockPartition partition_from_json(const Json& j);

Json plan_to_json(const TestPlan& p);
TestPlan plan_from_json(const Json& j);

Json report_to_json(const AuditReport& r);

// Everything about a generated reduction except the membership matrix.
Json reduction_meta_to_json(const ReductionOutput& out);

// base.cc holds the matrix, base.meta.json the sidecar.
void save_reduction(const ReductionOutput& out, const std::string& base);
ReductionOutput load_reduction(const std::string& class_path, const std::string& meta_path);

// Concept class files: ".json" is the structured format, anything else the
// bit-matrix text format.
ConceptClass load_concept_class(const std::string& path);
void save_concept_class(const ConceptClass& cls, const std::string& path);

LabelCoverInstance load_label_cover(const std::string& path);
void save_label_cover(const LabelCoverInstance& inst, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

} // namespace ccdim
