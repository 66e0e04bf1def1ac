#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>

#include "iaudit/app_model.hpp"

namespace iaudit {

enum class SignatureKind {
    Direct,
    DerivedCustom,
};

/// One data-collection method: a concrete analytics-SDK entry point, or an
/// app-defined wrapper derived from one (kind DerivedCustom).
struct DcmSignature {
    std::string library;
    std::string class_name;
    std::string method_name;
    std::string descriptor;
    SignatureKind kind = SignatureKind::Direct;

    bool operator==(const DcmSignature&) const = default;
};

struct LibraryPattern {
    std::string library;
    std::string class_prefix;

    bool operator==(const LibraryPattern&) const = default;
};

class SignatureDb {
public:
    /// Throws ParseError on a duplicate (class, method, descriptor) triple.
    void add(DcmSignature signature);
    void add_library(LibraryPattern pattern);

    const DcmSignature* find(std::string_view class_name, std::string_view method_name,
                             std::string_view descriptor) const;
    bool is_library_class(std::string_view class_name) const;

    const std::vector<DcmSignature>& signatures() const { return signatures_; }
    const std::vector<LibraryPattern>& libraries() const { return libraries_; }
    std::size_t direct_count() const;

private:
    std::vector<DcmSignature> signatures_;
    std::vector<LibraryPattern> libraries_;
    std::map<std::string, std::size_t> index_;  // "class|method|descriptor" -> position
};

SignatureDb parse_signatures_json(std::string_view json_text, const std::string& source);
SignatureDb load_signatures(const std::filesystem::path& path);
SignatureDb default_signatures();

/// A signature hit at a concrete bytecode location.
struct DcmMatch {
    DcmSignature signature;
    InvocationSite site;
    int line = 0;  // smali source line of the invoke

    bool operator==(const DcmMatch&) const = default;
};

/// Exact-triple match; no subtype reasoning.
std::optional<DcmMatch> match_invocation(const Invoke& invoke, const InvocationSite& site,
                                         const SignatureDb& db);

/// Every match in the app, in (class, method, instruction index) order.
std::vector<DcmMatch> find_all_matches(const AppModel& app, const SignatureDb& db);

struct CustomAnalytics {
    std::set<std::string> classes;  // descriptors of customized analytics classes
    std::vector<DcmSignature> derived_signatures;
    SignatureDb working_db;  // input db plus the derived entries
};

/// Marks app classes that invoke known DCMs and are referenced from a
/// declared activity (or one of its inner classes) as customized analytics
/// services. Every non-constructor method of such a class that reaches a
/// DCM invoke within the class becomes a DerivedCustom signature. Iterates
/// to a fixpoint, capped at three rounds.
CustomAnalytics detect_custom_analytics(const AppModel& app, const SignatureDb& db);

}  // namespace iaudit
