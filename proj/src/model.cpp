#include "iaudit/model.hpp"

namespace iaudit {

std::string_view label(DataType type) {
    switch (type) {
        case DataType::Presentation: return "app presentation";
        case DataType::Binary: return "binary";
        case DataType::Categorical: return "categorical";
        case DataType::UserInput: return "user input";
        case DataType::Gesture: return "gesture";
        case DataType::CompositeGesture: return "composite gesture";
    }
    return "";
}

std::string_view label(Technique technique) {
    switch (technique) {
        case Technique::Frequency: return "frequency";
        case Technique::Duration: return "duration";
        case Technique::MotionDetails: return "motion details";
    }
    return "";
}

std::string_view id_of(DataType type) {
    switch (type) {
        case DataType::Presentation: return "presentation";
        case DataType::Binary: return "binary";
        case DataType::Categorical: return "categorical";
        case DataType::UserInput: return "user_input";
        case DataType::Gesture: return "gesture";
        case DataType::CompositeGesture: return "composite_gesture";
    }
    return "";
}

std::string_view id_of(Technique technique) {
    switch (technique) {
        case Technique::Frequency: return "frequency";
        case Technique::Duration: return "duration";
        case Technique::MotionDetails: return "motion_details";
    }
    return "";
}

std::optional<DataType> data_type_from_id(std::string_view id) {
    for (DataType type : kAllDataTypes) {
        if (id_of(type) == id) return type;
    }
    return std::nullopt;
}

std::optional<Technique> technique_from_id(std::string_view id) {
    for (Technique technique : kAllTechniques) {
        if (id_of(technique) == id) return technique;
    }
    return std::nullopt;
}

std::vector<DataType> canonical_order(const DataTypeSet& types) {
    return {types.begin(), types.end()};
}

std::vector<Technique> canonical_order(const TechniqueSet& techniques) {
    return {techniques.begin(), techniques.end()};
}

std::string ParseError::format(const std::string& message, const std::string& source, int line) {
    std::string out;
    if (!source.empty()) {
        out += source;
        if (line > 0) out += ":" + std::to_string(line);
        out += ": ";
    }
    out += message;
    return out;
}

void refresh_evidence_unions(CollectionEvidence& evidence) {
    evidence.evidenced_types.clear();
    evidence.evidenced_techniques.clear();
    for (const EvidenceRecord& record : evidence.records) {
        evidence.evidenced_types.insert(record.data_type);
        evidence.evidenced_techniques.insert(record.techniques.begin(), record.techniques.end());
    }
}

}  // namespace iaudit
