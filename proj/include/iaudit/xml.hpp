#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "iaudit/model.hpp"

namespace iaudit {

/// Element-and-attribute subset of XML, enough for apktool's decoded
/// output (manifest, layouts, public.xml). No DTD handling; comments and
/// text content are skipped.
struct XmlAttribute {
    std::string name;  // as written, including namespace prefix
    std::string value;
};

struct XmlElement {
    std::string name;  // qualified tag name
    std::vector<XmlAttribute> attributes;
    std::vector<XmlElement> children;
    int line = 0;

    const std::string* attribute(std::string_view name) const;
};

/// Parses a document and returns its root element. Throws ParseError with
/// a line number on malformed input.
XmlElement parse_xml(std::string_view text, const std::string& source);

/// "android:id" -> "id", "com.example.widget.FancyChart" -> "FancyChart".
std::string_view xml_local_name(std::string_view qualified);

}  // namespace iaudit
