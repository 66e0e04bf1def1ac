#include "iaudit/xml.hpp"

#include <cctype>

namespace iaudit {
namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;
    const std::string& source;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    bool consume(std::string_view token) {
        if (text.compare(pos, token.size(), token) != 0) return false;
        for (std::size_t i = 0; i < token.size(); ++i) advance();
        return true;
    }

    void skip_whitespace() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, source, line);
    }
};

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' || c == '-' ||
           c == '.';
}

std::string read_name(Cursor& cursor) {
    std::size_t start = cursor.pos;
    while (!cursor.eof() && is_name_char(cursor.peek())) cursor.advance();
    if (cursor.pos == start) cursor.fail("expected a name");
    return std::string{cursor.text.substr(start, cursor.pos - start)};
}

std::string decode_attr_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] == '&') {
            if (raw.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
            if (raw.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
            if (raw.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
            if (raw.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
            if (raw.compare(i, 6, "&apos;") == 0) { out += '\''; i += 6; continue; }
        }
        out += raw[i++];
    }
    return out;
}

void skip_misc(Cursor& cursor) {
    for (;;) {
        cursor.skip_whitespace();
        if (cursor.consume("<!--")) {
            std::size_t end = cursor.text.find("-->", cursor.pos);
            if (end == std::string_view::npos) cursor.fail("unterminated comment");
            while (cursor.pos < end + 3) cursor.advance();
            continue;
        }
        if (cursor.pos + 1 < cursor.text.size() && cursor.peek() == '<' &&
            (cursor.text[cursor.pos + 1] == '?' || cursor.text[cursor.pos + 1] == '!')) {
            while (!cursor.eof() && cursor.peek() != '>') cursor.advance();
            if (cursor.eof()) cursor.fail("unterminated declaration");
            cursor.advance();
            continue;
        }
        return;
    }
}

XmlElement parse_element(Cursor& cursor) {
    if (cursor.eof() || cursor.peek() != '<') cursor.fail("expected '<'");
    XmlElement element;
    element.line = cursor.line;
    cursor.advance();
    element.name = read_name(cursor);

    for (;;) {
        cursor.skip_whitespace();
        if (cursor.eof()) cursor.fail("unterminated tag <" + element.name + ">");
        if (cursor.consume("/>")) return element;
        if (cursor.consume(">")) break;

        XmlAttribute attribute;
        attribute.name = read_name(cursor);
        cursor.skip_whitespace();
        if (!cursor.consume("=")) cursor.fail("expected '=' after attribute " + attribute.name);
        cursor.skip_whitespace();
        if (cursor.eof() || (cursor.peek() != '"' && cursor.peek() != '\'')) {
            cursor.fail("expected quoted value for attribute " + attribute.name);
        }
        char quote = cursor.advance();
        std::size_t start = cursor.pos;
        while (!cursor.eof() && cursor.peek() != quote) cursor.advance();
        if (cursor.eof()) cursor.fail("unterminated attribute value");
        attribute.value =
            decode_attr_entities(cursor.text.substr(start, cursor.pos - start));
        cursor.advance();
        element.attributes.push_back(std::move(attribute));
    }

    // Content: child elements and ignorable text until the matching close tag.
    for (;;) {
        while (!cursor.eof() && cursor.peek() != '<') cursor.advance();
        if (cursor.eof()) cursor.fail("missing </" + element.name + ">");
        if (cursor.consume("<!--")) {
            std::size_t end = cursor.text.find("-->", cursor.pos);
            if (end == std::string_view::npos) cursor.fail("unterminated comment");
            while (cursor.pos < end + 3) cursor.advance();
            continue;
        }
        if (cursor.text.compare(cursor.pos, 9, "<![CDATA[") == 0) {
            std::size_t end = cursor.text.find("]]>", cursor.pos);
            if (end == std::string_view::npos) cursor.fail("unterminated CDATA");
            while (cursor.pos < end + 3) cursor.advance();
            continue;
        }
        if (cursor.text.compare(cursor.pos, 2, "</") == 0) {
            cursor.advance();
            cursor.advance();
            std::string name = read_name(cursor);
            if (name != element.name) {
                cursor.fail("mismatched close tag </" + name + "> for <" + element.name + ">");
            }
            cursor.skip_whitespace();
            if (!cursor.consume(">")) cursor.fail("malformed close tag");
            return element;
        }
        element.children.push_back(parse_element(cursor));
    }
}

}  // namespace

const std::string* XmlElement::attribute(std::string_view name) const {
    for (const XmlAttribute& attribute : attributes) {
        if (attribute.name == name) return &attribute.value;
    }
    return nullptr;
}

XmlElement parse_xml(std::string_view text, const std::string& source) {
    // Drop a UTF-8 BOM if present.
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text = text.substr(3);
    Cursor cursor{text, 0, 1, source};
    skip_misc(cursor);
    if (cursor.eof()) cursor.fail("empty document");
    XmlElement root = parse_element(cursor);
    skip_misc(cursor);
    if (!cursor.eof()) cursor.fail("trailing content after root element");
    return root;
}

std::string_view xml_local_name(std::string_view qualified) {
    if (std::size_t colon = qualified.rfind(':'); colon != std::string_view::npos) {
        qualified = qualified.substr(colon + 1);
    }
    if (std::size_t dot = qualified.rfind('.'); dot != std::string_view::npos) {
        qualified = qualified.substr(dot + 1);
    }
    return qualified;
}

}  // namespace iaudit
