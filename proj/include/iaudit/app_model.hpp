#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>

#include "iaudit/smali.hpp"

namespace iaudit {

struct LayoutWidget {
    std::string layout_file;   // path relative to the app root (res/layout/main.xml)
    std::string element_name;  // unqualified tag name (Button, EditText, ...)
    std::string id_name;       // from android:id="@+id/<name>", empty if anonymous
    int line = 0;

    bool operator==(const LayoutWidget&) const = default;
};

struct ResourceEntry {
    std::string type;  // "id" or "layout"
    std::string name;

    bool operator==(const ResourceEntry&) const = default;
};

/// Resource-id table from res/values/public.xml; value <-> name is
/// bijective per type.
class ResourceTable {
public:
    void add(std::uint32_t value, ResourceEntry entry);
    const ResourceEntry* find(std::uint32_t value) const;
    std::optional<std::uint32_t> value_of(std::string_view type, std::string_view name) const;
    std::size_t size() const { return by_value_.size(); }

private:
    std::map<std::uint32_t, ResourceEntry> by_value_;
    std::map<std::pair<std::string, std::string>, std::uint32_t> by_name_;
};

struct ManifestInfo {
    std::string package_name;
    std::vector<std::string> activities;  // fully qualified dotted names
};

struct AppModel {
    std::string root_dir;
    ManifestInfo manifest;
    std::map<std::string, SmaliClass> classes;  // keyed by descriptor (Lcom/ex/Foo;)
    std::vector<LayoutWidget> layouts;
    ResourceTable resources;
    std::vector<std::string> warnings;

    const SmaliClass* find_class(std::string_view descriptor) const;
    /// Activity classes that resolved to parsed smali, as descriptors.
    std::vector<std::string> activity_descriptors() const;
};

std::vector<LayoutWidget> parse_layout_xml(std::string_view text, const std::string& path);

ManifestInfo parse_manifest(std::string_view text);

ResourceTable parse_public_xml(std::string_view text);

/// Loads an apktool-decoded directory: AndroidManifest.xml (required),
/// smali*/ trees, res/layout/*.xml and res/values/public.xml. Individual
/// file failures become warnings; a missing manifest is fatal.
AppModel load_app(const std::filesystem::path& directory);

}  // namespace iaudit
