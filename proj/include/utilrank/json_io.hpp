#pragma once

// nlohmann/json bindings for the domain types. Optional fields serialize as
// null; doubles round-trip exactly.

#include "json.hpp"
#include "utilrank/controller.hpp"
#include "utilrank/extract.hpp"
#include "utilrank/index.hpp"
#include "utilrank/ingest.hpp"
#include "utilrank/judge.hpp"

namespace utilrank {

using Json = nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(SegmentKind, {{SegmentKind::Narrative, "Narrative"}, {SegmentKind::Table, "Table"}})
NLOHMANN_JSON_SERIALIZE_ENUM(TableComplexity, {{TableComplexity::Complex, "Complex"},
                                               {TableComplexity::NonComplex, "NonComplex"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Provenance, {{Provenance::Keyword, "Keyword"},
                                          {Provenance::Embed, "Embed"},
                                          {Provenance::Both, "Both"}})
NLOHMANN_JSON_SERIALIZE_ENUM(EvidenceMode, {{EvidenceMode::NarrativeSpan, "NarrativeSpan"},
                                            {EvidenceMode::TableCells, "TableCells"},
                                            {EvidenceMode::ComplexTableCitation, "ComplexTableCitation"}})
NLOHMANN_JSON_SERIALIZE_ENUM(JudgeMode, {{JudgeMode::Single, "single"}, {JudgeMode::Staged, "staged"}})
NLOHMANN_JSON_SERIALIZE_ENUM(EndpointRole, {{EndpointRole::Controller, "Controller"},
                                            {EndpointRole::Judge, "Judge"},
                                            {EndpointRole::Embedding, "Embedding"}})

void to_json(Json& j, const CharSpan& v);
void from_json(const Json& j, CharSpan& v);
void to_json(Json& j, const DocumentSource& v);
void from_json(const Json& j, DocumentSource& v);
void to_json(Json& j, const Cell& v);
void from_json(const Json& j, Cell& v);
void to_json(Json& j, const TableBlock& v);
void from_json(const Json& j, TableBlock& v);
void to_json(Json& j, const Segment& v);
void from_json(const Json& j, Segment& v);
void to_json(Json& j, const ScoredCandidate& v);
void from_json(const Json& j, ScoredCandidate& v);
void to_json(Json& j, const QueryStatement& v);
void from_json(const Json& j, QueryStatement& v);
void to_json(Json& j, const JudgeVerdict& v);
void from_json(const Json& j, JudgeVerdict& v);
void to_json(Json& j, const Citation& v);
void from_json(const Json& j, Citation& v);
void to_json(Json& j, const EvidenceItem& v);
void from_json(const Json& j, EvidenceItem& v);
void to_json(Json& j, const ModelEndpoint& v);
void from_json(const Json& j, ModelEndpoint& v);

Json lexical_index_to_json(const LexicalIndex& index);
LexicalIndex lexical_index_from_json(const Json& j);
Json dense_index_to_json(const DenseIndex& index);
DenseIndex dense_index_from_json(const Json& j);

}  // namespace utilrank
