#pragma once

#include <filesystem>
#include <map>
#include <set>

#include "iaudit/signatures.hpp"

namespace iaudit {

/// Lookup tables the linker works from; shipped as data/linker_tables.json
/// and overridable with --tables.
struct LinkerTables {
    std::set<std::string> callbacks;  // listener callback method names
    std::set<std::string> composite_callbacks;  // promote record type to CompositeGesture
    std::map<std::string, DataType> widget_classification;  // element name -> type
    std::set<std::string> gesture_listener_interfaces;      // descriptors
    std::set<std::string> gesture_listener_supers;
    std::vector<std::pair<std::string, std::string>> timing_sources;   // (class, method)
    std::vector<std::pair<std::string, std::string>> motion_accessors; // (class, method)
};

LinkerTables parse_linker_tables_json(std::string_view json_text, const std::string& source);
LinkerTables load_linker_tables(const std::filesystem::path& path);
LinkerTables default_linker_tables();

struct LinkerOptions {
    int depth = 2;  // intra-app call depth for DCM reachability
    bool infer_duration = true;
    bool infer_motion = true;
};

/// activity -> layout edge, established by a layout const feeding
/// setContentView.
struct LayoutEdge {
    std::string activity;     // class descriptor
    std::string layout_name;  // resource name
    std::string layout_file;  // res/layout/<name>.xml

    bool operator==(const LayoutEdge&) const = default;
};

/// activity -> widget edge, established by an id const feeding findViewById.
struct WidgetBinding {
    std::string activity;
    LayoutWidget widget;
    std::string method_name;  // method containing the findViewById
    std::string method_descriptor;
    int instruction_index = 0;  // index of the findViewById invoke

    bool operator==(const WidgetBinding&) const = default;
};

/// widget -> listener edge from a setOn*Listener registration.
struct ListenerEdge {
    std::string activity;
    LayoutWidget widget;
    std::string listener_class;
    std::string registration_method;  // setOnClickListener, ...
    int instruction_index = 0;

    bool operator==(const ListenerEdge&) const = default;
};

struct LinkGraph {
    std::vector<LayoutEdge> layout_edges;
    std::vector<WidgetBinding> widget_bindings;
    std::vector<ListenerEdge> listener_edges;
    std::map<std::string, std::vector<std::string>> callbacks;  // listener class -> callbacks
    std::vector<DcmMatch> activity_invocations;  // DCMs reached directly from activity methods
    std::vector<std::string> diagnostics;        // heuristic misses, unresolved links
};

/// Fig.-2-style cardinality violations (a listener registered on two
/// widgets, ...); empty on conforming apps.
std::vector<std::string> cardinality_violations(const LinkGraph& graph);

void resolve_layout_bindings(const AppModel& app, LinkGraph& graph);
void resolve_listener_registrations(const AppModel& app, LinkGraph& graph);

std::vector<std::string> enumerate_callbacks(const SmaliClass& listener,
                                             const LinkerTables& tables);

/// DCM matches in the callback body plus matches reachable through
/// intra-app calls up to `depth` levels (cycle-safe).
std::vector<DcmMatch> collect_dcm_invocations(const AppModel& app, const std::string& class_name,
                                              const SmaliMethod& method, const SignatureDb& db,
                                              int depth);

DataType classify_widget(const std::string& element_name, const LinkerTables& tables,
                         bool* known = nullptr);

TechniqueSet infer_techniques(const AppModel& app, const std::string& listener_class,
                              const SmaliMethod& callback, const LinkerTables& tables,
                              const LinkerOptions& options);

struct ExtractionResult {
    CollectionEvidence evidence;
    LinkGraph graph;
    CustomAnalytics custom;
    std::vector<std::string> diagnostics;  // graph diagnostics + classification warnings
};

/// Full pipeline: custom-analytics augmentation, layout/listener linking,
/// callback walking, technique inference, gesture-detector attachment.
/// Records come out sorted by invocation site.
ExtractionResult extract_evidence(const AppModel& app, const SignatureDb& db,
                                  const LinkerTables& tables, const LinkerOptions& options = {});

ExtractionResult extract_evidence(const AppModel& app, const SignatureDb& db,
                                  const LinkerOptions& options = {});

}  // namespace iaudit
