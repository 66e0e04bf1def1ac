#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "iaudit/linker.hpp"

using namespace iaudit;

namespace {

std::filesystem::path fixture(const char* relative) {
    return std::filesystem::path{IAUDIT_FIXTURE_DIR} / relative;
}

AppModel load_fixture_app(const char* name) {
    return load_app(fixture((std::string{"apps/"} + name).c_str()));
}

const EvidenceRecord* find_record(const CollectionEvidence& evidence, std::string_view id_name) {
    for (const EvidenceRecord& record : evidence.records) {
        if (record.widget.id_name == id_name) return &record;
    }
    return nullptr;
}

bool frequency_floor(const CollectionEvidence& evidence) {
    for (const EvidenceRecord& record : evidence.records) {
        if (record.techniques.empty() || !record.techniques.count(Technique::Frequency)) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("classify_widget follows the bundled table") {
    LinkerTables tables = default_linker_tables();
    CHECK(classify_widget("Button", tables) == DataType::Binary);
    CHECK(classify_widget("EditText", tables) == DataType::UserInput);
    CHECK(classify_widget("CheckBox", tables) == DataType::Categorical);
    CHECK(classify_widget("Spinner", tables) == DataType::Categorical);
    CHECK(classify_widget("View", tables) == DataType::Presentation);
    CHECK(classify_widget("ScrollView", tables) == DataType::Gesture);

    bool known = true;
    CHECK(classify_widget("MyCustomChart", tables, &known) == DataType::Presentation);
    CHECK(!known);
}

TEST_CASE("layout bindings resolve via the resource table") {
    AppModel app = load_fixture_app("minimal_app");
    LinkGraph graph;
    resolve_layout_bindings(app, graph);

    REQUIRE(graph.layout_edges.size() == 1);
    CHECK(graph.layout_edges[0].activity == "Lcom/example/minimal/MainActivity;");
    CHECK(graph.layout_edges[0].layout_file == "res/layout/activity_main.xml");

    REQUIRE(graph.widget_bindings.size() == 1);
    CHECK(graph.widget_bindings[0].widget.id_name == "send");
    CHECK(graph.widget_bindings[0].widget.element_name == "Button");
    CHECK(graph.widget_bindings[0].method_name == "onCreate");
}

TEST_CASE("listener registrations link widget to listener class") {
    AppModel app = load_fixture_app("minimal_app");
    LinkGraph graph;
    resolve_layout_bindings(app, graph);
    resolve_listener_registrations(app, graph);

    REQUIRE(graph.listener_edges.size() == 1);
    CHECK(graph.listener_edges[0].widget.id_name == "send");
    CHECK(graph.listener_edges[0].listener_class == "Lcom/example/minimal/MainActivity$1;");
    CHECK(graph.listener_edges[0].registration_method == "setOnClickListener");
}

TEST_CASE("a this-registration resolves to the activity class") {
    AppModel app = load_fixture_app("multidex_app");
    LinkGraph graph;
    resolve_layout_bindings(app, graph);
    resolve_listener_registrations(app, graph);

    REQUIRE(graph.listener_edges.size() == 1);
    CHECK(graph.listener_edges[0].listener_class == "Lcom/example/multi/MainActivity;");
}

TEST_CASE("enumerate_callbacks uses the callback table") {
    AppModel app = load_fixture_app("minimal_app");
    LinkerTables tables = default_linker_tables();
    const SmaliClass* listener = app.find_class("Lcom/example/minimal/MainActivity$1;");
    REQUIRE(listener != nullptr);
    CHECK(enumerate_callbacks(*listener, tables) == std::vector<std::string>{"onClick"});

    AppModel gesture = load_fixture_app("gesture_app");
    const SmaliClass* handler = gesture.find_class("Lcom/example/gesture/GestureHandler;");
    REQUIRE(handler != nullptr);
    CHECK(enumerate_callbacks(*handler, tables) ==
          std::vector<std::string>{"onFling", "onDoubleTap"});

    const SmaliClass* plain = gesture.find_class("Lcom/example/gesture/CanvasActivity;");
    REQUIRE(plain != nullptr);
    CHECK(enumerate_callbacks(*plain, tables).empty());
}

TEST_CASE("minimal fixture produces exactly the hand-traced record") {
    AppModel app = load_fixture_app("minimal_app");
    ExtractionResult result = extract_evidence(app, default_signatures());

    REQUIRE(result.evidence.records.size() == 1);
    const EvidenceRecord& record = result.evidence.records[0];
    CHECK(record.widget.id_name == "send");
    CHECK(record.data_type == DataType::Binary);
    CHECK(record.techniques == TechniqueSet{Technique::Frequency});
    CHECK(record.library == "Firebase Analytics");
    CHECK(record.callback == "onClick");
    CHECK(record.invocation.class_name == "Lcom/example/minimal/MainActivity$1;");
    CHECK(result.evidence.app_id == "com.example.minimal");
    CHECK(result.evidence.evidenced_types == DataTypeSet{DataType::Binary});
}

TEST_CASE("app with zero dcm invocations yields empty evidence") {
    AppModel app = load_fixture_app("tiny_app");
    ExtractionResult result = extract_evidence(app, default_signatures());
    CHECK(result.evidence.records.empty());
    CHECK(result.evidence.evidenced_types.empty());
    CHECK(result.evidence.evidenced_techniques.empty());
}

TEST_CASE("call depth controls wrapper reachability") {
    AppModel app = load_fixture_app("wrapper_app");
    SignatureDb db = default_signatures();

    LinkerOptions depth0;
    depth0.depth = 0;
    LinkerOptions depth1;
    depth1.depth = 1;
    LinkerOptions depth2;
    depth2.depth = 2;

    ExtractionResult at0 = extract_evidence(app, db, default_linker_tables(), depth0);
    ExtractionResult at1 = extract_evidence(app, db, default_linker_tables(), depth1);
    ExtractionResult at2 = extract_evidence(app, db, default_linker_tables(), depth2);

    CHECK(at0.evidence.records.empty());
    CHECK(at1.evidence.records.size() == 1);
    CHECK(at2.evidence.records.size() == 2);

    CHECK(find_record(at1.evidence, "button_one") != nullptr);
    CHECK(find_record(at2.evidence, "button_one") != nullptr);
    CHECK(find_record(at2.evidence, "button_two") != nullptr);
    CHECK(find_record(at2.evidence, "button_two")->library == "AppsFlyer");

    // Depth monotonicity on invocation sites.
    auto sites = [](const CollectionEvidence& evidence) {
        std::set<InvocationSite> out;
        for (const EvidenceRecord& record : evidence.records) out.insert(record.invocation);
        return out;
    };
    std::set<InvocationSite> s0 = sites(at0.evidence);
    std::set<InvocationSite> s1 = sites(at1.evidence);
    std::set<InvocationSite> s2 = sites(at2.evidence);
    CHECK(std::includes(s1.begin(), s1.end(), s0.begin(), s0.end()));
    CHECK(std::includes(s2.begin(), s2.end(), s1.begin(), s1.end()));
}

TEST_CASE("recursive helpers terminate and report each match once") {
    std::string activity_text =
        ".class public Lcom/ex/LoopActivity;\n"
        ".super Landroid/app/Activity;\n"
        ".method public onClick(Landroid/view/View;)V\n"
        "    invoke-static {}, Lcom/ex/Ping;->ping()V\n"
        ".end method\n";
    std::string ping_text =
        ".class public Lcom/ex/Ping;\n"
        ".super Ljava/lang/Object;\n"
        ".method public static ping()V\n"
        "    invoke-static {}, Lcom/ex/Pong;->pong()V\n"
        "    return-void\n"
        ".end method\n";
    std::string pong_text =
        ".class public Lcom/ex/Pong;\n"
        ".super Ljava/lang/Object;\n"
        ".method public static pong()V\n"
        "    const/4 v0, 0x0\n"
        "    invoke-virtual {v0, v0, v0}, Lcom/google/firebase/analytics/FirebaseAnalytics;->"
        "logEvent(Ljava/lang/String;Landroid/os/Bundle;)V\n"
        "    invoke-static {}, Lcom/ex/Ping;->ping()V\n"
        "    return-void\n"
        ".end method\n";

    AppModel app;
    for (const std::string& text : {activity_text, ping_text, pong_text}) {
        SmaliClass cls = parse_smali_file(text, "inline.smali");
        app.classes.emplace(cls.name, std::move(cls));
    }

    const SmaliClass* activity = app.find_class("Lcom/ex/LoopActivity;");
    const SmaliMethod* method = activity->find_method("onClick", "(Landroid/view/View;)V");
    std::vector<DcmMatch> matches = collect_dcm_invocations(
        app, "Lcom/ex/LoopActivity;", *method, default_signatures(), 10);
    CHECK(matches.size() == 1);
}

TEST_CASE("technique inference adds duration and motion on top of the frequency floor") {
    AppModel app = load_fixture_app("gesture_app");
    ExtractionResult result = extract_evidence(app, default_signatures());

    REQUIRE(result.evidence.records.size() == 3);
    CHECK(frequency_floor(result.evidence));

    const EvidenceRecord* fling = nullptr;
    const EvidenceRecord* double_tap = nullptr;
    const EvidenceRecord* hold = nullptr;
    for (const EvidenceRecord& record : result.evidence.records) {
        if (record.callback == "onFling") fling = &record;
        if (record.callback == "onDoubleTap") double_tap = &record;
        if (record.callback == "onLongPress") hold = &record;
    }
    REQUIRE(fling != nullptr);
    REQUIRE(double_tap != nullptr);
    REQUIRE(hold != nullptr);

    // Forwarded gesture detector attaches to the pane widget.
    CHECK(fling->widget.id_name == "pane");
    CHECK(fling->data_type == DataType::Gesture);
    CHECK(fling->techniques == TechniqueSet{Technique::Frequency, Technique::MotionDetails});

    // Composite promotion for onDoubleTap.
    CHECK(double_tap->data_type == DataType::CompositeGesture);
    CHECK(double_tap->techniques == TechniqueSet{Technique::Frequency});

    // Standalone gesture listener lands on the activity with a null widget
    // and picks up duration from the class-level timing call.
    CHECK(hold->widget.is_null());
    CHECK(hold->data_type == DataType::CompositeGesture);
    CHECK(hold->techniques == TechniqueSet{Technique::Frequency, Technique::Duration});

    bool null_widget_diagnostic = false;
    for (const std::string& diagnostic : result.diagnostics) {
        if (diagnostic.find("no forwarding widget") != std::string::npos) {
            null_widget_diagnostic = true;
        }
    }
    CHECK(null_widget_diagnostic);
}

TEST_CASE("technique inference toggles are honored") {
    AppModel app = load_fixture_app("gesture_app");
    LinkerOptions options;
    options.infer_duration = false;
    options.infer_motion = false;
    ExtractionResult result = extract_evidence(app, default_signatures(),
                                               default_linker_tables(), options);
    for (const EvidenceRecord& record : result.evidence.records) {
        CHECK(record.techniques == TechniqueSet{Technique::Frequency});
    }
}

TEST_CASE("yr-style fixture evidences four types with frequency only") {
    AppModel app = load_fixture_app("yr_app");
    ExtractionResult result = extract_evidence(app, default_signatures());

    CHECK(result.evidence.records.size() == 4);
    CHECK(result.evidence.evidenced_types ==
          DataTypeSet{DataType::Presentation, DataType::Binary, DataType::Categorical,
                      DataType::UserInput});
    CHECK(result.evidence.evidenced_techniques == TechniqueSet{Technique::Frequency});
    CHECK(frequency_floor(result.evidence));

    CHECK(find_record(result.evidence, "banner")->data_type == DataType::Presentation);
    CHECK(find_record(result.evidence, "refresh")->data_type == DataType::Binary);
    CHECK(find_record(result.evidence, "units")->data_type == DataType::Categorical);
    CHECK(find_record(result.evidence, "search")->data_type == DataType::UserInput);
}

TEST_CASE("derived custom signatures surface as custom-library records") {
    AppModel app = load_fixture_app("custom_app");
    ExtractionResult result = extract_evidence(app, default_signatures());

    REQUIRE(result.evidence.records.size() == 1);
    const EvidenceRecord& record = result.evidence.records[0];
    CHECK(record.widget.id_name == "submit");
    CHECK(record.data_type == DataType::Binary);
    CHECK(record.library == "custom");
    CHECK(record.invocation.class_name == "Lcom/example/custom/MainActivity$1;");

    // onStart reaches two derived DCMs straight from the activity.
    CHECK(result.graph.activity_invocations.size() == 2);
}

TEST_CASE("unknown widget elements classify as presentation with a warning") {
    AppModel app = load_fixture_app("broken_app");
    ExtractionResult result = extract_evidence(app, default_signatures());

    REQUIRE(result.evidence.records.size() == 1);
    CHECK(result.evidence.records[0].widget.element_name == "MyCustomChart");
    CHECK(result.evidence.records[0].data_type == DataType::Presentation);

    bool warned = false;
    for (const std::string& diagnostic : result.diagnostics) {
        if (diagnostic.find("unknown widget element") != std::string::npos) warned = true;
    }
    CHECK(warned);
}

TEST_CASE("records are emitted in invocation-site order and deterministically") {
    AppModel app = load_fixture_app("tiktok_app");
    ExtractionResult first = extract_evidence(app, default_signatures());
    ExtractionResult second = extract_evidence(app, default_signatures());
    CHECK(first.evidence == second.evidence);

    for (std::size_t i = 1; i < first.evidence.records.size(); ++i) {
        const InvocationSite& a = first.evidence.records[i - 1].invocation;
        const InvocationSite& b = first.evidence.records[i].invocation;
        CHECK(a <= b);
    }
}

TEST_CASE("tiktok-style fixture evidences all six types and all three techniques") {
    AppModel app = load_fixture_app("tiktok_app");
    ExtractionResult result = extract_evidence(app, default_signatures());

    CHECK(result.evidence.evidenced_types ==
          DataTypeSet{DataType::Presentation, DataType::Binary, DataType::Categorical,
                      DataType::UserInput, DataType::Gesture, DataType::CompositeGesture});
    CHECK(result.evidence.evidenced_techniques ==
          TechniqueSet{Technique::Frequency, Technique::Duration, Technique::MotionDetails});
    CHECK(frequency_floor(result.evidence));
}

TEST_CASE("fig-2 cardinalities hold on every fixture extraction") {
    for (const char* name : {"minimal_app", "tiny_app", "wrapper_app", "custom_app",
                             "gesture_app", "yr_app", "tiktok_app", "broken_app",
                             "multidex_app"}) {
        CAPTURE(name);
        AppModel app = load_fixture_app(name);
        ExtractionResult result = extract_evidence(app, default_signatures());
        CHECK(cardinality_violations(result.graph).empty());
    }
}

TEST_CASE("every record's invocation site re-reads as the matched signature") {
    for (const char* name : {"minimal_app", "wrapper_app", "custom_app", "gesture_app",
                             "yr_app", "tiktok_app"}) {
        CAPTURE(name);
        AppModel app = load_fixture_app(name);
        ExtractionResult result = extract_evidence(app, default_signatures());
        for (const EvidenceRecord& record : result.evidence.records) {
            const SmaliClass* cls = app.find_class(record.invocation.class_name);
            REQUIRE(cls != nullptr);
            const SmaliMethod* method = cls->find_method(record.invocation.method_name,
                                                         record.invocation.method_descriptor);
            REQUIRE(method != nullptr);
            REQUIRE(record.invocation.instruction_index <
                    static_cast<int>(method->instructions.size()));
            const Invoke* invoke =
                method->instructions[record.invocation.instruction_index].invoke();
            REQUIRE(invoke != nullptr);
            const DcmSignature* signature = result.custom.working_db.find(
                invoke->target_class, invoke->method_name, invoke->descriptor);
            CHECK(signature != nullptr);
        }
    }
}

TEST_CASE("linker tables parse failures are located") {
    CHECK_THROWS_AS(parse_linker_tables_json("nope", "tables"), ParseError);
    CHECK_THROWS(parse_linker_tables_json(R"({"callbacks": []})", "tables"));
}

TEST_CASE("unmatched analytics invocations surface as diagnostics") {
    AppModel app = load_fixture_app("custom_app");
    ExtractionResult result = extract_evidence(app, default_signatures());
    bool surfaced = false;
    for (const std::string& diagnostic : result.diagnostics) {
        if (diagnostic.find("unmatched analytics invocation") != std::string::npos &&
            diagnostic.find("resetAnalyticsData") != std::string::npos) {
            surfaced = true;
        }
    }
    CHECK(surfaced);
}

namespace {

// Assembles an AppModel straight from smali strings; resources and layouts
// added by hand.
AppModel inline_app(const std::vector<std::string>& class_texts) {
    AppModel app;
    app.manifest.package_name = "com.ex";
    for (const std::string& text : class_texts) {
        SmaliClass cls = parse_smali_file(text, "inline.smali");
        app.classes.emplace(cls.name, std::move(cls));
    }
    return app;
}

}  // namespace

TEST_CASE("findViewById on an id absent from bound layouts warns and skips the edge") {
    AppModel app = inline_app({
        ".class public Lcom/ex/Main;\n"
        ".super Landroid/app/Activity;\n"
        ".method protected onCreate(Landroid/os/Bundle;)V\n"
        "    const v0, 0x7f030000\n"
        "    invoke-virtual {p0, v0}, Lcom/ex/Main;->setContentView(I)V\n"
        "    const v0, 0x7f080000\n"
        "    invoke-virtual {p0, v0}, Lcom/ex/Main;->findViewById(I)Landroid/view/View;\n"
        "    return-void\n"
        ".end method\n"});
    app.manifest.activities = {"com.ex.Main"};
    app.resources.add(0x7f030000, ResourceEntry{"layout", "main"});
    app.resources.add(0x7f080000, ResourceEntry{"id", "ghost"});
    app.layouts.push_back(LayoutWidget{"res/layout/main.xml", "LinearLayout", "", 1});
    // No widget named "ghost" anywhere.

    LinkGraph graph;
    resolve_layout_bindings(app, graph);
    CHECK(graph.layout_edges.size() == 1);
    CHECK(graph.widget_bindings.empty());
    REQUIRE(graph.diagnostics.size() >= 1);
    CHECK(graph.diagnostics[0].find("ghost") != std::string::npos);
}

TEST_CASE("an activity without setContentView binds no layouts") {
    AppModel app = inline_app({
        ".class public Lcom/ex/Main;\n"
        ".super Landroid/app/Activity;\n"
        ".method protected onCreate(Landroid/os/Bundle;)V\n"
        "    const v0, 0x7f030000\n"
        "    return-void\n"
        ".end method\n"});
    app.manifest.activities = {"com.ex.Main"};
    app.resources.add(0x7f030000, ResourceEntry{"layout", "main"});

    LinkGraph graph;
    resolve_layout_bindings(app, graph);
    CHECK(graph.layout_edges.empty());
}

TEST_CASE("a registration without a preceding findViewById is a diagnostic, not an edge") {
    AppModel app = inline_app({
        ".class public Lcom/ex/Main;\n"
        ".super Landroid/app/Activity;\n"
        ".method protected onCreate(Landroid/os/Bundle;)V\n"
        "    new-instance v0, Lcom/ex/Main$1;\n"
        "    invoke-virtual {v1, v0}, Landroid/view/View;->setOnClickListener("
        "Landroid/view/View$OnClickListener;)V\n"
        "    return-void\n"
        ".end method\n"});
    app.manifest.activities = {"com.ex.Main"};

    LinkGraph graph;
    resolve_layout_bindings(app, graph);
    resolve_listener_registrations(app, graph);
    CHECK(graph.listener_edges.empty());
    bool noted = false;
    for (const std::string& diagnostic : graph.diagnostics) {
        if (diagnostic.find("no preceding findViewById") != std::string::npos) noted = true;
    }
    CHECK(noted);
}

TEST_CASE("onTouch reading motion accessors adds motion details") {
    AppModel app = inline_app({
        ".class public Lcom/ex/Toucher;\n"
        ".super Ljava/lang/Object;\n"
        ".implements Landroid/view/View$OnTouchListener;\n"
        ".method public onTouch(Landroid/view/View;Landroid/view/MotionEvent;)Z\n"
        "    invoke-virtual {p2}, Landroid/view/MotionEvent;->getX()F\n"
        "    invoke-virtual {p2}, Landroid/view/MotionEvent;->getY()F\n"
        "    const/4 v0, 0x0\n"
        "    invoke-virtual {v1, v0, v0}, Lcom/google/firebase/analytics/FirebaseAnalytics;->"
        "logEvent(Ljava/lang/String;Landroid/os/Bundle;)V\n"
        "    const/4 v0, 0x1\n"
        "    return v0\n"
        ".end method\n"});
    const SmaliClass* cls = app.find_class("Lcom/ex/Toucher;");
    const SmaliMethod* callback =
        cls->find_method("onTouch", "(Landroid/view/View;Landroid/view/MotionEvent;)Z");
    TechniqueSet techniques = infer_techniques(app, "Lcom/ex/Toucher;", *callback,
                                               default_linker_tables(), LinkerOptions{});
    CHECK(techniques == TechniqueSet{Technique::Frequency, Technique::MotionDetails});
}

TEST_CASE("onClick with a currentTimeMillis delta adds duration") {
    AppModel app = inline_app({
        ".class public Lcom/ex/Timer;\n"
        ".super Ljava/lang/Object;\n"
        ".implements Landroid/view/View$OnClickListener;\n"
        ".method public onClick(Landroid/view/View;)V\n"
        "    invoke-static {}, Ljava/lang/System;->currentTimeMillis()J\n"
        "    move-result-wide v0\n"
        "    const/4 v2, 0x0\n"
        "    invoke-virtual {v3, v2, v2}, Lcom/google/firebase/analytics/FirebaseAnalytics;->"
        "logEvent(Ljava/lang/String;Landroid/os/Bundle;)V\n"
        "    return-void\n"
        ".end method\n"});
    const SmaliClass* cls = app.find_class("Lcom/ex/Timer;");
    const SmaliMethod* callback = cls->find_method("onClick", "(Landroid/view/View;)V");
    TechniqueSet techniques = infer_techniques(app, "Lcom/ex/Timer;", *callback,
                                               default_linker_tables(), LinkerOptions{});
    CHECK(techniques == TechniqueSet{Technique::Frequency, Technique::Duration});
}
