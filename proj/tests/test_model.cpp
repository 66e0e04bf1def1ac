#include <doctest.h>

#include "iaudit/model.hpp"

using namespace iaudit;

TEST_CASE("exactly six data types and three techniques exist") {
    CHECK(kAllDataTypes.size() == 6);
    CHECK(kAllTechniques.size() == 3);
    CHECK(kAllDataTypes.front() == DataType::Presentation);
    CHECK(kAllDataTypes.back() == DataType::CompositeGesture);
}

TEST_CASE("human labels match the published vocabulary") {
    CHECK(label(DataType::Presentation) == "app presentation");
    CHECK(label(DataType::Binary) == "binary");
    CHECK(label(DataType::Categorical) == "categorical");
    CHECK(label(DataType::UserInput) == "user input");
    CHECK(label(DataType::Gesture) == "gesture");
    CHECK(label(DataType::CompositeGesture) == "composite gesture");
    CHECK(label(Technique::Frequency) == "frequency");
    CHECK(label(Technique::Duration) == "duration");
    CHECK(label(Technique::MotionDetails) == "motion details");
}

TEST_CASE("canonical_order sorts into declaration order") {
    CHECK(canonical_order(DataTypeSet{DataType::Binary, DataType::Presentation}) ==
          std::vector<DataType>{DataType::Presentation, DataType::Binary});
    CHECK(canonical_order(TechniqueSet{Technique::MotionDetails, Technique::Frequency}) ==
          std::vector<Technique>{Technique::Frequency, Technique::MotionDetails});
    CHECK(canonical_order(DataTypeSet{}).empty());
}

TEST_CASE("machine ids round-trip") {
    for (DataType type : kAllDataTypes) {
        CHECK(data_type_from_id(id_of(type)) == type);
    }
    for (Technique technique : kAllTechniques) {
        CHECK(technique_from_id(id_of(technique)) == technique);
    }
    CHECK(!data_type_from_id("bogus").has_value());
    CHECK(!technique_from_id("").has_value());
}

TEST_CASE("refresh_evidence_unions recomputes from records") {
    CollectionEvidence evidence;
    EvidenceRecord record;
    record.data_type = DataType::Binary;
    record.techniques = {Technique::Frequency};
    evidence.records.push_back(record);
    record.data_type = DataType::Gesture;
    record.techniques = {Technique::Frequency, Technique::MotionDetails};
    evidence.records.push_back(record);

    refresh_evidence_unions(evidence);
    CHECK(evidence.evidenced_types == DataTypeSet{DataType::Binary, DataType::Gesture});
    CHECK(evidence.evidenced_techniques ==
          TechniqueSet{Technique::Frequency, Technique::MotionDetails});
}
