#include "iaudit/app_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "iaudit/xml.hpp"

namespace iaudit {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw std::runtime_error("cannot read file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void collect_widgets(const XmlElement& element, const std::string& layout_file,
                     std::vector<LayoutWidget>& out) {
    LayoutWidget widget;
    widget.layout_file = layout_file;
    widget.element_name = std::string{xml_local_name(element.name)};
    widget.line = element.line;
    if (const std::string* id = element.attribute("android:id")) {
        std::string_view value{*id};
        if (value.starts_with("@+id/")) {
            value = value.substr(5);
        } else if (value.starts_with("@id/")) {
            value = value.substr(4);
        }
        widget.id_name = std::string{value};
    }
    out.push_back(std::move(widget));
    for (const XmlElement& child : element.children) {
        collect_widgets(child, layout_file, out);
    }
}

std::uint32_t parse_resource_id(const std::string& text, int line) {
    std::string_view digits{text};
    int base = 10;
    if (digits.starts_with("0x") || digits.starts_with("0X")) {
        base = 16;
        digits = digits.substr(2);
    }
    std::uint64_t value = 0;
    for (char c : digits) {
        int v;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (base == 16 && c >= 'a' && c <= 'f') {
            v = c - 'a' + 10;
        } else if (base == 16 && c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
        } else {
            throw ParseError("malformed resource id '" + text + "'", "public.xml", line);
        }
        value = value * base + static_cast<std::uint64_t>(v);
        if (value > 0xFFFFFFFFull) {
            throw ParseError("resource id out of range '" + text + "'", "public.xml", line);
        }
    }
    if (digits.empty()) throw ParseError("malformed resource id '" + text + "'", "public.xml", line);
    return static_cast<std::uint32_t>(value);
}

// smali/, smali_classes2/, ... in deterministic order.
std::vector<fs::path> smali_roots(const fs::path& directory) {
    std::vector<fs::path> roots;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_directory()) continue;
        std::string name = entry.path().filename().string();
        if (name == "smali" || name.starts_with("smali_classes")) {
            roots.push_back(entry.path());
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<fs::path> sorted_files(const fs::path& root, std::string_view extension,
                                   bool recursive) {
    std::vector<fs::path> files;
    if (!fs::exists(root)) return files;
    if (recursive) {
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (entry.is_regular_file() && entry.path().extension() == extension) {
                files.push_back(entry.path());
            }
        }
    } else {
        for (const auto& entry : fs::directory_iterator(root)) {
            if (entry.is_regular_file() && entry.path().extension() == extension) {
                files.push_back(entry.path());
            }
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

void ResourceTable::add(std::uint32_t value, ResourceEntry entry) {
    if (!by_name_.emplace(std::make_pair(entry.type, entry.name), value).second) {
        throw ParseError("duplicate resource entry (" + entry.type + ", " + entry.name + ")");
    }
    auto [it, inserted] = by_value_.emplace(value, std::move(entry));
    if (!inserted) {
        throw ParseError("duplicate resource id value for (" + it->second.type + ", " +
                         it->second.name + ")");
    }
}

const ResourceEntry* ResourceTable::find(std::uint32_t value) const {
    auto it = by_value_.find(value);
    return it == by_value_.end() ? nullptr : &it->second;
}

std::optional<std::uint32_t> ResourceTable::value_of(std::string_view type,
                                                     std::string_view name) const {
    auto it = by_name_.find(std::make_pair(std::string{type}, std::string{name}));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

const SmaliClass* AppModel::find_class(std::string_view descriptor) const {
    auto it = classes.find(std::string{descriptor});
    return it == classes.end() ? nullptr : &it->second;
}

std::vector<std::string> AppModel::activity_descriptors() const {
    std::vector<std::string> out;
    for (const std::string& activity : manifest.activities) {
        std::string descriptor = java_to_descriptor(activity);
        if (classes.count(descriptor)) out.push_back(std::move(descriptor));
    }
    return out;
}

std::vector<LayoutWidget> parse_layout_xml(std::string_view text, const std::string& path) {
    XmlElement root = parse_xml(text, path);
    std::vector<LayoutWidget> widgets;
    collect_widgets(root, path, widgets);
    return widgets;
}

ManifestInfo parse_manifest(std::string_view text) {
    XmlElement root = parse_xml(text, "AndroidManifest.xml");
    if (root.name != "manifest") {
        throw ParseError("root element is <" + root.name + ">, expected <manifest>");
    }
    const std::string* package = root.attribute("package");
    if (package == nullptr || package->empty()) {
        throw ParseError("manifest lacks a package attribute");
    }

    ManifestInfo info;
    info.package_name = *package;

    // <activity> elements live under <application>; walk everything to be safe.
    std::vector<const XmlElement*> stack{&root};
    while (!stack.empty()) {
        const XmlElement* element = stack.back();
        stack.pop_back();
        if (xml_local_name(element->name) == "activity") {
            if (const std::string* name = element->attribute("android:name")) {
                std::string resolved = *name;
                if (!resolved.empty() && resolved.front() == '.') {
                    resolved = info.package_name + resolved;
                } else if (resolved.find('.') == std::string::npos) {
                    resolved = info.package_name + "." + resolved;
                }
                info.activities.push_back(std::move(resolved));
            }
        }
        for (const XmlElement& child : element->children) stack.push_back(&child);
    }
    // The stack walk visits children in reverse; restore document order.
    std::reverse(info.activities.begin(), info.activities.end());
    return info;
}

ResourceTable parse_public_xml(std::string_view text) {
    XmlElement root = parse_xml(text, "public.xml");
    ResourceTable table;
    for (const XmlElement& child : root.children) {
        if (xml_local_name(child.name) != "public") continue;
        const std::string* type = child.attribute("type");
        const std::string* name = child.attribute("name");
        const std::string* id = child.attribute("id");
        if (type == nullptr || name == nullptr || id == nullptr) {
            throw ParseError("public entry lacks type/name/id", "public.xml", child.line);
        }
        if (*type != "id" && *type != "layout") continue;
        table.add(parse_resource_id(*id, child.line), ResourceEntry{*type, *name});
    }
    return table;
}

AppModel load_app(const std::filesystem::path& directory) {
    const fs::path manifest_path = directory / "AndroidManifest.xml";
    if (!fs::exists(manifest_path)) {
        throw std::runtime_error("missing AndroidManifest.xml in " + directory.string());
    }

    AppModel app;
    app.root_dir = directory.string();
    app.manifest = parse_manifest(read_file(manifest_path));

    for (const fs::path& root : smali_roots(directory)) {
        for (const fs::path& file : sorted_files(root, ".smali", true)) {
            std::string relative = fs::relative(file, directory).string();
            try {
                SmaliClass parsed = parse_smali_file(read_file(file), relative);
                auto [it, inserted] = app.classes.emplace(parsed.name, std::move(parsed));
                if (!inserted) {
                    app.warnings.push_back("duplicate class " + it->first + " in " + relative +
                                           "; first definition wins");
                }
            } catch (const std::exception& e) {
                app.warnings.push_back(std::string{"skipped smali file: "} + e.what());
            }
        }
    }

    for (const fs::path& file : sorted_files(directory / "res" / "layout", ".xml", false)) {
        std::string relative = fs::relative(file, directory).generic_string();
        try {
            std::vector<LayoutWidget> widgets = parse_layout_xml(read_file(file), relative);
            app.layouts.insert(app.layouts.end(), widgets.begin(), widgets.end());
        } catch (const std::exception& e) {
            app.warnings.push_back(std::string{"skipped layout file: "} + e.what());
        }
    }

    const fs::path public_xml = directory / "res" / "values" / "public.xml";
    if (fs::exists(public_xml)) {
        try {
            app.resources = parse_public_xml(read_file(public_xml));
        } catch (const std::exception& e) {
            app.warnings.push_back(std::string{"skipped public.xml: "} + e.what());
        }
    } else {
        app.warnings.push_back("res/values/public.xml absent; resource ids cannot be resolved");
    }

    for (const std::string& activity : app.manifest.activities) {
        if (!app.classes.count(java_to_descriptor(activity))) {
            app.warnings.push_back("declared activity has no parsed class: " + activity);
        }
    }
    return app;
}

}  // namespace iaudit
