#include "iaudit/linker.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "iaudit/embedded_data.hpp"

namespace iaudit {
namespace {

using nlohmann::json;

constexpr std::string_view kGestureDetectorClass = "Landroid/view/GestureDetector;";

bool is_listener_registration(const Invoke& invoke) {
    return invoke.method_name.starts_with("setOn") && invoke.method_name.ends_with("Listener");
}

// First parameter type of a method descriptor "(Lfoo;I)V" -> "Lfoo;".
std::string first_parameter_type(std::string_view descriptor) {
    if (descriptor.size() < 2 || descriptor.front() != '(') return {};
    std::string_view params = descriptor.substr(1);
    if (params.empty() || params.front() != 'L') return {};
    std::size_t semi = params.find(';');
    if (semi == std::string_view::npos) return {};
    return std::string{params.substr(0, semi + 1)};
}

bool class_references(const SmaliClass& cls, std::string_view target) {
    for (const SmaliMethod& method : cls.methods) {
        for (const Instruction& instruction : method.instructions) {
            if (const Invoke* invoke = instruction.invoke()) {
                if (invoke->target_class == target) return true;
            } else if (const NewInstance* created = instruction.new_instance()) {
                if (created->class_name == target) return true;
            }
        }
    }
    return false;
}

bool is_gesture_listener(const SmaliClass& cls, const LinkerTables& tables) {
    if (tables.gesture_listener_supers.count(cls.super_name)) return true;
    return std::any_of(cls.interfaces.begin(), cls.interfaces.end(),
                       [&](const std::string& iface) {
                           return tables.gesture_listener_interfaces.count(iface) > 0;
                       });
}

bool forwards_to_gesture_detector(const SmaliClass& cls) {
    for (const SmaliMethod& method : cls.methods) {
        if (method.name != "onTouch") continue;
        for (const Instruction& instruction : method.instructions) {
            const Invoke* invoke = instruction.invoke();
            if (invoke != nullptr && invoke->target_class == kGestureDetectorClass &&
                invoke->method_name == "onTouchEvent") {
                return true;
            }
        }
    }
    return false;
}

bool invokes_any(const SmaliClass& cls,
                 const std::vector<std::pair<std::string, std::string>>& sources) {
    for (const SmaliMethod& method : cls.methods) {
        for (const Instruction& instruction : method.instructions) {
            const Invoke* invoke = instruction.invoke();
            if (invoke == nullptr) continue;
            for (const auto& [class_name, method_name] : sources) {
                if (invoke->target_class == class_name && invoke->method_name == method_name) {
                    return true;
                }
            }
        }
    }
    return false;
}

// Methods reachable from `start` through intra-app calls within `depth`
// hops, the start method included.
std::vector<std::pair<std::string, const SmaliMethod*>> reachable_methods(
    const AppModel& app, const std::string& class_name, const SmaliMethod& start,
    const SignatureDb& db, int depth) {
    std::vector<std::pair<std::string, const SmaliMethod*>> out;
    std::set<std::string> visited;
    std::deque<std::tuple<std::string, const SmaliMethod*, int>> queue;
    queue.push_back({class_name, &start, 0});
    visited.insert(class_name + "|" + start.name + start.descriptor);

    while (!queue.empty()) {
        auto [cls, method, level] = queue.front();
        queue.pop_front();
        out.push_back({cls, method});
        if (level >= depth) continue;
        for (const Instruction& instruction : method->instructions) {
            const Invoke* invoke = instruction.invoke();
            if (invoke == nullptr) continue;
            // A matching invoke is the evidence endpoint; don't walk into
            // the collection method itself.
            if (db.find(invoke->target_class, invoke->method_name, invoke->descriptor)) continue;
            const SmaliClass* target = app.find_class(invoke->target_class);
            if (target == nullptr) continue;
            const SmaliMethod* callee = target->find_method(invoke->method_name,
                                                            invoke->descriptor);
            if (callee == nullptr) continue;
            std::string key = invoke->target_class + "|" + invoke->method_name +
                              invoke->descriptor;
            if (!visited.insert(key).second) continue;
            queue.push_back({invoke->target_class, callee, level + 1});
        }
    }
    return out;
}

std::vector<const SmaliMethod*> callback_methods(const SmaliClass& cls,
                                                 const LinkerTables& tables) {
    std::vector<const SmaliMethod*> out;
    for (const SmaliMethod& method : cls.methods) {
        if (tables.callbacks.count(method.name)) out.push_back(&method);
    }
    return out;
}

std::string widget_key(const WidgetRef& widget) {
    return widget.layout_file + "|" + widget.id_name + "|" + widget.element_name;
}

WidgetRef to_ref(const LayoutWidget& widget) {
    return WidgetRef{widget.layout_file, widget.id_name, widget.element_name};
}

std::pair<std::string, std::string> json_to_pair(const json& entry, const std::string& source) {
    if (!entry.contains("class") || !entry.contains("method")) {
        throw ParseError("table entry lacks class/method", source);
    }
    return {entry.at("class").get<std::string>(), entry.at("method").get<std::string>()};
}

}  // namespace

LinkerTables parse_linker_tables_json(std::string_view json_text, const std::string& source) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string{"invalid linker tables JSON: "} + e.what(), source);
    }

    LinkerTables tables;
    for (const json& name : root.at("callbacks")) {
        tables.callbacks.insert(name.get<std::string>());
    }
    for (const json& name : root.at("composite_callbacks")) {
        tables.composite_callbacks.insert(name.get<std::string>());
    }
    for (const auto& [element, type_id] : root.at("widget_classification").items()) {
        auto type = data_type_from_id(type_id.get<std::string>());
        if (!type) {
            throw ParseError("unknown data type '" + type_id.get<std::string>() +
                                 "' for widget '" + element + "'",
                             source);
        }
        tables.widget_classification.emplace(element, *type);
    }
    for (const json& name : root.at("gesture_listener_interfaces")) {
        tables.gesture_listener_interfaces.insert(name.get<std::string>());
    }
    for (const json& name : root.at("gesture_listener_supers")) {
        tables.gesture_listener_supers.insert(name.get<std::string>());
    }
    for (const json& entry : root.at("timing_sources")) {
        tables.timing_sources.push_back(json_to_pair(entry, source));
    }
    for (const json& entry : root.at("motion_accessors")) {
        tables.motion_accessors.push_back(json_to_pair(entry, source));
    }
    return tables;
}

LinkerTables load_linker_tables(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) throw std::runtime_error("cannot read linker tables: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_linker_tables_json(buffer.str(), path.string());
}

LinkerTables default_linker_tables() {
    return parse_linker_tables_json(embedded::kLinkerTablesJson, "<builtin linker tables>");
}

std::vector<std::string> cardinality_violations(const LinkGraph& graph) {
    std::vector<std::string> violations;
    std::map<std::string, std::set<std::string>> listener_widgets;
    for (const ListenerEdge& edge : graph.listener_edges) {
        listener_widgets[edge.listener_class].insert(widget_key(to_ref(edge.widget)));
    }
    for (const auto& [listener, widgets] : listener_widgets) {
        if (widgets.size() > 1) {
            violations.push_back("listener " + listener + " is linked to " +
                                 std::to_string(widgets.size()) + " widgets (expected 1-1)");
        }
    }
    return violations;
}

void resolve_layout_bindings(const AppModel& app, LinkGraph& graph) {
    const std::vector<std::string> activities = app.activity_descriptors();

    // Layout edges first: findViewById resolution below searches every
    // layout the activity has bound, regardless of method order.
    for (const std::string& activity : activities) {
        const SmaliClass* cls = app.find_class(activity);
        for (const SmaliMethod& method : cls->methods) {
            for (std::size_t i = 0; i < method.instructions.size(); ++i) {
                const ConstInt* constant = method.instructions[i].const_int();
                if (constant == nullptr) continue;
                const ResourceEntry* entry =
                    app.resources.find(static_cast<std::uint32_t>(constant->value));
                if (entry == nullptr || entry->type != "layout") continue;
                for (std::size_t j = i + 1; j < method.instructions.size(); ++j) {
                    const Invoke* invoke = method.instructions[j].invoke();
                    if (invoke == nullptr || invoke->method_name != "setContentView") continue;
                    LayoutEdge edge{activity, entry->name, "res/layout/" + entry->name + ".xml"};
                    if (std::find(graph.layout_edges.begin(), graph.layout_edges.end(), edge) ==
                        graph.layout_edges.end()) {
                        graph.layout_edges.push_back(std::move(edge));
                    }
                    break;
                }
            }
        }
    }

    for (const std::string& activity : activities) {
        std::set<std::string> bound_layouts;
        for (const LayoutEdge& edge : graph.layout_edges) {
            if (edge.activity == activity) bound_layouts.insert(edge.layout_file);
        }

        const SmaliClass* cls = app.find_class(activity);
        for (const SmaliMethod& method : cls->methods) {
            std::set<std::size_t> resolved_sites;
            for (std::size_t i = 0; i < method.instructions.size(); ++i) {
                const ConstInt* constant = method.instructions[i].const_int();
                if (constant == nullptr) continue;
                const ResourceEntry* entry =
                    app.resources.find(static_cast<std::uint32_t>(constant->value));
                if (entry == nullptr || entry->type != "id") continue;
                for (std::size_t j = i + 1; j < method.instructions.size(); ++j) {
                    const Invoke* invoke = method.instructions[j].invoke();
                    if (invoke == nullptr || invoke->method_name != "findViewById") continue;
                    const LayoutWidget* widget = nullptr;
                    for (const LayoutWidget& candidate : app.layouts) {
                        if (candidate.id_name == entry->name &&
                            bound_layouts.count(candidate.layout_file)) {
                            widget = &candidate;
                            break;
                        }
                    }
                    if (widget == nullptr) {
                        graph.diagnostics.push_back(
                            "findViewById id '" + entry->name + "' in " + activity + "->" +
                            method.name + " not present in any bound layout");
                    } else {
                        graph.widget_bindings.push_back(WidgetBinding{
                            activity, *widget, method.name, method.descriptor,
                            static_cast<int>(j)});
                        resolved_sites.insert(j);
                    }
                    break;
                }
            }
            for (std::size_t j = 0; j < method.instructions.size(); ++j) {
                const Invoke* invoke = method.instructions[j].invoke();
                if (invoke == nullptr || invoke->method_name != "findViewById") continue;
                if (!resolved_sites.count(j)) {
                    graph.diagnostics.push_back("findViewById in " + activity + "->" +
                                                method.name +
                                                " has no resolvable preceding const");
                }
            }
        }
    }
}

void resolve_listener_registrations(const AppModel& app, LinkGraph& graph) {
    for (const std::string& activity : app.activity_descriptors()) {
        const SmaliClass* cls = app.find_class(activity);
        for (const SmaliMethod& method : cls->methods) {
            for (std::size_t r = 0; r < method.instructions.size(); ++r) {
                const Invoke* registration = method.instructions[r].invoke();
                if (registration == nullptr || !is_listener_registration(*registration)) continue;

                // Nearest preceding findViewById binding in this method.
                const WidgetBinding* binding = nullptr;
                for (const WidgetBinding& candidate : graph.widget_bindings) {
                    if (candidate.activity != activity || candidate.method_name != method.name ||
                        candidate.method_descriptor != method.descriptor) {
                        continue;
                    }
                    if (candidate.instruction_index >= static_cast<int>(r)) continue;
                    if (binding == nullptr ||
                        candidate.instruction_index > binding->instruction_index) {
                        binding = &candidate;
                    }
                }
                if (binding == nullptr) {
                    graph.diagnostics.push_back(
                        registration->method_name + " in " + activity + "->" + method.name +
                        " has no preceding findViewById; registration skipped");
                    continue;
                }

                // Listener class: nearest preceding new-instance, else the
                // registration's parameter interface (resolved to the
                // activity itself when it implements that interface).
                std::string listener_class;
                for (std::size_t k = r; k-- > 0;) {
                    if (const NewInstance* created = method.instructions[k].new_instance()) {
                        listener_class = created->class_name;
                        break;
                    }
                }
                if (listener_class.empty()) {
                    std::string parameter = first_parameter_type(registration->descriptor);
                    bool activity_implements =
                        std::find(cls->interfaces.begin(), cls->interfaces.end(), parameter) !=
                        cls->interfaces.end();
                    listener_class = activity_implements ? activity : parameter;
                    if (listener_class.empty()) {
                        graph.diagnostics.push_back(registration->method_name + " in " + activity +
                                                    "->" + method.name +
                                                    " has no resolvable listener class");
                        continue;
                    }
                }

                graph.listener_edges.push_back(ListenerEdge{activity, binding->widget,
                                                            listener_class,
                                                            registration->method_name,
                                                            static_cast<int>(r)});
            }
        }
    }
}

std::vector<std::string> enumerate_callbacks(const SmaliClass& listener,
                                             const LinkerTables& tables) {
    std::vector<std::string> names;
    for (const SmaliMethod* method : callback_methods(listener, tables)) {
        if (std::find(names.begin(), names.end(), method->name) == names.end()) {
            names.push_back(method->name);
        }
    }
    return names;
}

std::vector<DcmMatch> collect_dcm_invocations(const AppModel& app, const std::string& class_name,
                                              const SmaliMethod& method, const SignatureDb& db,
                                              int depth) {
    std::vector<DcmMatch> matches;
    for (const auto& [cls, reached] : reachable_methods(app, class_name, method, db, depth)) {
        for (std::size_t i = 0; i < reached->instructions.size(); ++i) {
            const Invoke* invoke = reached->instructions[i].invoke();
            if (invoke == nullptr) continue;
            InvocationSite site{cls, reached->name, reached->descriptor, static_cast<int>(i)};
            if (auto match = match_invocation(*invoke, site, db)) {
                match->line = reached->instructions[i].line;
                matches.push_back(std::move(*match));
            }
        }
    }
    return matches;
}

DataType classify_widget(const std::string& element_name, const LinkerTables& tables,
                         bool* known) {
    auto it = tables.widget_classification.find(element_name);
    if (known != nullptr) *known = it != tables.widget_classification.end();
    // Unknown elements behave like plain Views.
    return it == tables.widget_classification.end() ? DataType::Presentation : it->second;
}

TechniqueSet infer_techniques(const AppModel& app, const std::string& listener_class,
                              const SmaliMethod& callback, const LinkerTables& tables,
                              const LinkerOptions& options) {
    TechniqueSet techniques{Technique::Frequency};  // a DCM call logs an occurrence

    if (options.infer_duration) {
        const SmaliClass* cls = app.find_class(listener_class);
        if (cls != nullptr && invokes_any(*cls, tables.timing_sources)) {
            techniques.insert(Technique::Duration);
        }
    }

    if (options.infer_motion) {
        // The motion check walks the same helper set the DCM collection does.
        SignatureDb empty;
        for (const auto& [cls_name, method] :
             reachable_methods(app, listener_class, callback, empty, options.depth)) {
            for (const Instruction& instruction : method->instructions) {
                const Invoke* invoke = instruction.invoke();
                if (invoke == nullptr) continue;
                for (const auto& [accessor_class, accessor_method] : tables.motion_accessors) {
                    if (invoke->target_class == accessor_class &&
                        invoke->method_name == accessor_method) {
                        techniques.insert(Technique::MotionDetails);
                        return techniques;
                    }
                }
            }
        }
    }
    return techniques;
}

ExtractionResult extract_evidence(const AppModel& app, const SignatureDb& db,
                                  const LinkerTables& tables, const LinkerOptions& options) {
    ExtractionResult result;
    result.custom = detect_custom_analytics(app, db);
    const SignatureDb& working = result.custom.working_db;

    resolve_layout_bindings(app, result.graph);
    resolve_listener_registrations(app, result.graph);

    std::set<std::string> warned_elements;
    std::set<std::string> emitted;
    auto emit_key = [](const std::string& listener, const std::string& callback,
                       const InvocationSite& site, const WidgetRef& widget) {
        return listener + "|" + callback + "|" + site.class_name + "|" + site.method_name +
               site.method_descriptor + "|" + std::to_string(site.instruction_index) + "|" +
               widget_key(widget);
    };

    auto emit_records = [&](const WidgetRef& widget, DataType base_type,
                            const std::string& listener_class, const SmaliMethod& callback,
                            const std::vector<DcmMatch>& matches) {
        DataType data_type = tables.composite_callbacks.count(callback.name)
                                 ? DataType::CompositeGesture
                                 : base_type;
        TechniqueSet techniques =
            infer_techniques(app, listener_class, callback, tables, options);
        for (const DcmMatch& match : matches) {
            if (!emitted.insert(emit_key(listener_class, callback.name, match.site, widget))
                     .second) {
                continue;
            }
            EvidenceRecord record;
            record.widget = widget;
            record.data_type = data_type;
            record.techniques = techniques;
            record.invocation = match.site;
            record.library = match.signature.kind == SignatureKind::DerivedCustom
                                 ? "custom"
                                 : match.signature.library;
            record.callback = callback.name;
            record.listener_class = listener_class;
            result.evidence.records.push_back(std::move(record));
        }
    };

    // Widget listeners registered through setOn*Listener.
    for (const ListenerEdge& edge : result.graph.listener_edges) {
        const SmaliClass* listener = app.find_class(edge.listener_class);
        if (listener == nullptr) {
            result.diagnostics.push_back("listener class " + edge.listener_class +
                                         " is not part of the app; callbacks unavailable");
            continue;
        }
        result.graph.callbacks[edge.listener_class] = enumerate_callbacks(*listener, tables);

        bool known = true;
        DataType widget_type = classify_widget(edge.widget.element_name, tables, &known);
        if (!known && warned_elements.insert(edge.widget.element_name).second) {
            result.diagnostics.push_back("unknown widget element '" + edge.widget.element_name +
                                         "' classified as app presentation");
        }
        for (const SmaliMethod* callback : callback_methods(*listener, tables)) {
            std::vector<DcmMatch> matches = collect_dcm_invocations(
                app, edge.listener_class, *callback, working, options.depth);
            if (matches.empty()) continue;
            emit_records(to_ref(edge.widget), widget_type, edge.listener_class, *callback,
                         matches);
        }
    }

    // GestureDetector listeners: not registered on widgets directly. Attach
    // to the widget whose onTouch listener forwards to the detector, else to
    // the owning activity with a null widget reference.
    const std::vector<std::string> activities = app.activity_descriptors();
    for (const auto& [class_name, cls] : app.classes) {
        if (!is_gesture_listener(cls, tables)) continue;

        WidgetRef widget;  // null by default
        bool attached = false;
        for (const ListenerEdge& edge : result.graph.listener_edges) {
            const SmaliClass* forwarder = app.find_class(edge.listener_class);
            if (forwarder == nullptr || !forwards_to_gesture_detector(*forwarder)) continue;
            // Only a forwarder that itself references the gesture class wires
            // it to a widget; anything looser misattributes when an activity
            // owns several detectors.
            if (class_references(*forwarder, class_name)) {
                widget = to_ref(edge.widget);
                attached = true;
                break;
            }
        }
        if (!attached) {
            bool owned = false;
            for (const std::string& activity_name : activities) {
                if (class_references(*app.find_class(activity_name), class_name)) {
                    owned = true;
                    break;
                }
            }
            if (!owned) continue;  // dead listener; nothing to attach to
            result.diagnostics.push_back("gesture listener " + class_name +
                                         " has no forwarding widget; attached to activity");
        }

        result.graph.callbacks[class_name] = enumerate_callbacks(cls, tables);
        for (const SmaliMethod* callback : callback_methods(cls, tables)) {
            std::vector<DcmMatch> matches =
                collect_dcm_invocations(app, class_name, *callback, working, options.depth);
            if (matches.empty()) continue;
            emit_records(widget, DataType::Gesture, class_name, *callback, matches);
        }
    }

    // Direct activity -> DCM edges (graph only; types need a widget).
    for (const std::string& activity : activities) {
        const SmaliClass* cls = app.find_class(activity);
        for (const SmaliMethod& method : cls->methods) {
            for (std::size_t i = 0; i < method.instructions.size(); ++i) {
                const Invoke* invoke = method.instructions[i].invoke();
                if (invoke == nullptr) continue;
                InvocationSite site{activity, method.name, method.descriptor,
                                    static_cast<int>(i)};
                if (auto match = match_invocation(*invoke, site, working)) {
                    match->line = method.instructions[i].line;
                    result.graph.activity_invocations.push_back(std::move(*match));
                }
            }
        }
    }

    // Calls into known analytics libraries that match no signature are a
    // known false-negative source (renamed or unlisted DCMs); surface them.
    for (const auto& [class_name, cls] : app.classes) {
        if (db.is_library_class(class_name)) continue;
        for (const SmaliMethod& method : cls.methods) {
            for (const Instruction& instruction : method.instructions) {
                const Invoke* invoke = instruction.invoke();
                if (invoke == nullptr) continue;
                if (!db.is_library_class(invoke->target_class)) continue;
                if (invoke->method_name == "<init>" || invoke->method_name == "<clinit>" ||
                    invoke->method_name == "getInstance") {
                    continue;  // handle acquisition, not collection
                }
                if (working.find(invoke->target_class, invoke->method_name,
                                 invoke->descriptor) != nullptr) {
                    continue;
                }
                result.diagnostics.push_back(
                    "unmatched analytics invocation " + invoke->target_class + "->" +
                    invoke->method_name + invoke->descriptor + " in " + class_name + "->" +
                    method.name);
            }
        }
    }

    std::sort(result.evidence.records.begin(), result.evidence.records.end(),
              [](const EvidenceRecord& a, const EvidenceRecord& b) {
                  return std::tie(a.invocation, a.widget, a.callback, a.listener_class) <
                         std::tie(b.invocation, b.widget, b.callback, b.listener_class);
              });

    result.evidence.app_id = app.manifest.package_name;
    refresh_evidence_unions(result.evidence);

    result.diagnostics.insert(result.diagnostics.end(), result.graph.diagnostics.begin(),
                              result.graph.diagnostics.end());
    return result;
}

ExtractionResult extract_evidence(const AppModel& app, const SignatureDb& db,
                                  const LinkerOptions& options) {
    return extract_evidence(app, db, default_linker_tables(), options);
}

}  // namespace iaudit
