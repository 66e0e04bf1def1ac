#include "iaudit/signatures.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "iaudit/embedded_data.hpp"

namespace iaudit {
namespace {

using nlohmann::json;

std::string triple_key(std::string_view class_name, std::string_view method_name,
                       std::string_view descriptor) {
    std::string key;
    key.reserve(class_name.size() + method_name.size() + descriptor.size() + 2);
    key += class_name;
    key += '|';
    key += method_name;
    key += '|';
    key += descriptor;
    return key;
}

void require_fields(const json& object, std::initializer_list<const char*> fields,
                    const std::string& source, const char* what) {
    for (const auto& [key, value] : object.items()) {
        if (std::find_if(fields.begin(), fields.end(),
                         [&](const char* f) { return key == f; }) == fields.end()) {
            throw ParseError(std::string{"unknown field '"} + key + "' in " + what, source);
        }
    }
    for (const char* field : fields) {
        if (!object.contains(field)) {
            throw ParseError(std::string{what} + " lacks field '" + field + "'", source);
        }
    }
}

// Methods of `cls` that reach a db-matching invoke through calls that stay
// inside `cls`.
std::set<std::string> reaching_methods(const SmaliClass& cls, const SignatureDb& db) {
    // method signature key -> directly matching / local callees
    std::map<std::string, std::vector<std::string>> local_calls;
    std::set<std::string> reaches;

    auto method_key = [](const SmaliMethod& m) { return m.name + m.descriptor; };

    for (const SmaliMethod& method : cls.methods) {
        for (const Instruction& instruction : method.instructions) {
            const Invoke* invoke = instruction.invoke();
            if (invoke == nullptr) continue;
            if (db.find(invoke->target_class, invoke->method_name, invoke->descriptor)) {
                reaches.insert(method_key(method));
            } else if (invoke->target_class == cls.name) {
                local_calls[method_key(method)].push_back(invoke->method_name +
                                                          invoke->descriptor);
            }
        }
    }

    // Propagate reachability backwards through intra-class calls.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [caller, callees] : local_calls) {
            if (reaches.count(caller)) continue;
            for (const std::string& callee : callees) {
                if (reaches.count(callee)) {
                    reaches.insert(caller);
                    changed = true;
                    break;
                }
            }
        }
    }
    return reaches;
}

}  // namespace

void SignatureDb::add(DcmSignature signature) {
    std::string key = triple_key(signature.class_name, signature.method_name,
                                 signature.descriptor);
    if (index_.count(key)) {
        throw ParseError("duplicate signature " + signature.class_name + "->" +
                         signature.method_name + signature.descriptor);
    }
    index_.emplace(std::move(key), signatures_.size());
    signatures_.push_back(std::move(signature));
}

void SignatureDb::add_library(LibraryPattern pattern) {
    libraries_.push_back(std::move(pattern));
}

const DcmSignature* SignatureDb::find(std::string_view class_name, std::string_view method_name,
                                      std::string_view descriptor) const {
    auto it = index_.find(triple_key(class_name, method_name, descriptor));
    return it == index_.end() ? nullptr : &signatures_[it->second];
}

bool SignatureDb::is_library_class(std::string_view class_name) const {
    return std::any_of(libraries_.begin(), libraries_.end(), [&](const LibraryPattern& pattern) {
        return class_name.starts_with(pattern.class_prefix);
    });
}

std::size_t SignatureDb::direct_count() const {
    return static_cast<std::size_t>(
        std::count_if(signatures_.begin(), signatures_.end(),
                      [](const DcmSignature& s) { return s.kind == SignatureKind::Direct; }));
}

SignatureDb parse_signatures_json(std::string_view json_text, const std::string& source) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string{"invalid signature JSON: "} + e.what(), source);
    }
    if (!root.is_object()) throw ParseError("signature DB root must be an object", source);
    for (const auto& [key, value] : root.items()) {
        if (key != "libraries" && key != "signatures") {
            throw ParseError("unknown field '" + key + "' in signature DB", source);
        }
    }

    SignatureDb db;
    std::set<std::string> library_names;
    for (const json& entry : root.value("libraries", json::array())) {
        require_fields(entry, {"library", "class_prefix"}, source, "library declaration");
        LibraryPattern pattern{entry.at("library").get<std::string>(),
                               entry.at("class_prefix").get<std::string>()};
        library_names.insert(pattern.library);
        db.add_library(std::move(pattern));
    }
    for (const json& entry : root.value("signatures", json::array())) {
        require_fields(entry, {"library", "class", "method", "descriptor"}, source, "signature");
        DcmSignature signature;
        signature.library = entry.at("library").get<std::string>();
        signature.class_name = entry.at("class").get<std::string>();
        signature.method_name = entry.at("method").get<std::string>();
        signature.descriptor = entry.at("descriptor").get<std::string>();
        signature.kind = SignatureKind::Direct;
        if (!library_names.count(signature.library)) {
            throw ParseError("signature library '" + signature.library +
                                 "' is not declared under libraries",
                             source);
        }
        db.add(std::move(signature));
    }
    return db;
}

SignatureDb load_signatures(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) throw std::runtime_error("cannot read signature DB: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_signatures_json(buffer.str(), path.string());
}

SignatureDb default_signatures() {
    return parse_signatures_json(embedded::kSignaturesJson, "<builtin signatures>");
}

std::optional<DcmMatch> match_invocation(const Invoke& invoke, const InvocationSite& site,
                                         const SignatureDb& db) {
    const DcmSignature* signature =
        db.find(invoke.target_class, invoke.method_name, invoke.descriptor);
    if (signature == nullptr) return std::nullopt;
    return DcmMatch{*signature, site, 0};
}

std::vector<DcmMatch> find_all_matches(const AppModel& app, const SignatureDb& db) {
    std::vector<DcmMatch> matches;
    for (const auto& [class_name, cls] : app.classes) {
        for (const SmaliMethod& method : cls.methods) {
            for (std::size_t i = 0; i < method.instructions.size(); ++i) {
                const Instruction& instruction = method.instructions[i];
                const Invoke* invoke = instruction.invoke();
                if (invoke == nullptr) continue;
                InvocationSite site{class_name, method.name, method.descriptor,
                                    static_cast<int>(i)};
                if (auto match = match_invocation(*invoke, site, db)) {
                    match->line = instruction.line;
                    matches.push_back(std::move(*match));
                }
            }
        }
    }
    return matches;
}

CustomAnalytics detect_custom_analytics(const AppModel& app, const SignatureDb& db) {
    CustomAnalytics result;
    result.working_db = db;

    // Classes reachable by reference (invoke target or new-instance) from a
    // declared activity or one of its inner classes.
    std::set<std::string> activity_classes;
    std::set<std::string> referenced_from_activities;
    for (const std::string& activity : app.activity_descriptors()) {
        activity_classes.insert(activity);
        std::string inner_prefix = activity.substr(0, activity.size() - 1) + "$";
        for (const auto& [class_name, cls] : app.classes) {
            if (class_name != activity && !class_name.starts_with(inner_prefix)) continue;
            for (const SmaliMethod& method : cls.methods) {
                for (const Instruction& instruction : method.instructions) {
                    if (const Invoke* invoke = instruction.invoke()) {
                        referenced_from_activities.insert(invoke->target_class);
                    } else if (const NewInstance* created = instruction.new_instance()) {
                        referenced_from_activities.insert(created->class_name);
                    }
                }
            }
        }
    }

    // Wrapper-of-wrapper chains surface one layer per round as the derived
    // signatures land in the working DB; three rounds bound the depth.
    for (int round = 0; round < 3; ++round) {
        bool changed = false;
        for (const auto& [class_name, cls] : app.classes) {
            if (result.classes.count(class_name)) continue;
            if (activity_classes.count(class_name)) continue;  // collection site, not a service
            if (db.is_library_class(class_name)) continue;     // the SDK itself
            if (!referenced_from_activities.count(class_name)) continue;

            std::set<std::string> reaches = reaching_methods(cls, result.working_db);
            if (reaches.empty()) continue;

            result.classes.insert(class_name);
            changed = true;
            for (const SmaliMethod& method : cls.methods) {
                if (method.is_constructor()) continue;
                if (!reaches.count(method.name + method.descriptor)) continue;
                DcmSignature derived{"custom", class_name, method.name, method.descriptor,
                                     SignatureKind::DerivedCustom};
                result.derived_signatures.push_back(derived);
                result.working_db.add(std::move(derived));
            }
            result.working_db.add_library(LibraryPattern{"custom", class_name});
        }
        if (!changed) break;
    }
    return result;
}

}  // namespace iaudit
