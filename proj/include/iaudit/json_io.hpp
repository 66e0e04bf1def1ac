#pragma once

#include <json.hpp>

#include "iaudit/factcheck.hpp"
#include "iaudit/policy.hpp"

namespace iaudit {

nlohmann::json to_json(const DataTypeSet& types);
nlohmann::json to_json(const TechniqueSet& techniques);
DataTypeSet data_type_set_from_json(const nlohmann::json& array);
TechniqueSet technique_set_from_json(const nlohmann::json& array);

nlohmann::json to_json(const CollectionClaim& claim);
CollectionClaim claim_from_json(const nlohmann::json& object);

nlohmann::json to_json(const EvidenceRecord& record);
EvidenceRecord record_from_json(const nlohmann::json& object);

nlohmann::json to_json(const CollectionEvidence& evidence);
CollectionEvidence evidence_from_json(const nlohmann::json& object);

nlohmann::json to_json(const FactCheckResult& result);
FactCheckResult factcheck_from_json(const nlohmann::json& object);

nlohmann::json to_json(const CorpusStats& stats);

nlohmann::json to_json(const ExtractedSentence& sentence);

}  // namespace iaudit
