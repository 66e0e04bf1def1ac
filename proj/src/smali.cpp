#include "iaudit/smali.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace iaudit {
namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

// Strips a trailing "# ..." comment, ignoring '#' inside string literals.
std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

bool is_class_descriptor(std::string_view token) {
    return token.size() >= 3 && token.front() == 'L' && token.back() == ';';
}

std::string_view first_word(std::string_view line) {
    std::size_t end = 0;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    return line.substr(0, end);
}

struct MethodRef {
    std::string class_name;
    std::string method_name;
    std::string descriptor;
};

MethodRef parse_method_ref(std::string_view ref, const std::string& path, int line) {
    std::size_t arrow = ref.find("->");
    if (arrow == std::string_view::npos) {
        throw ParseError("method reference lacks '->'", path, line);
    }
    std::string_view class_part = ref.substr(0, arrow);
    std::string_view member = ref.substr(arrow + 2);
    std::size_t paren = member.find('(');
    if (class_part.empty() || paren == std::string_view::npos || paren == 0 ||
        member.find(')') == std::string_view::npos) {
        throw ParseError("malformed method reference '" + std::string{ref} + "'", path, line);
    }
    return MethodRef{std::string{class_part}, std::string{member.substr(0, paren)},
                     std::string{member.substr(paren)}};
}

std::int32_t parse_int_literal(std::string_view token, const std::string& path, int line) {
    bool negative = false;
    std::string_view digits = token;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
        negative = digits.front() == '-';
        digits.remove_prefix(1);
    }
    int base = 10;
    if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
        base = 16;
        digits.remove_prefix(2);
    }
    // baksmali may suffix wide literals with L/l or t/s type markers
    while (!digits.empty() && std::isalpha(static_cast<unsigned char>(digits.back())) &&
           !(base == 16 && std::isxdigit(static_cast<unsigned char>(digits.back())))) {
        digits.remove_suffix(1);
    }
    if (digits.empty()) throw ParseError("malformed const literal '" + std::string{token} + "'", path, line);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw ParseError("malformed const literal '" + std::string{token} + "'", path, line);
    }
    auto truncated = static_cast<std::uint32_t>(value);
    std::int32_t result = static_cast<std::int32_t>(truncated);
    return negative ? -result : result;
}

// Block directives whose whole body gets skipped.
bool block_end_matches(std::string_view line, std::string_view kind) {
    auto tokens = split_tokens(line);
    return tokens.size() >= 2 && tokens[0] == ".end" && tokens[1] == kind;
}

}  // namespace

std::string_view to_string(InvokeKind kind) {
    switch (kind) {
        case InvokeKind::Virtual: return "virtual";
        case InvokeKind::Static: return "static";
        case InvokeKind::Direct: return "direct";
        case InvokeKind::Interface: return "interface";
    }
    return "";
}

const SmaliMethod* SmaliClass::find_method(std::string_view name,
                                           std::string_view descriptor) const {
    for (const SmaliMethod& method : methods) {
        if (method.name == name && method.descriptor == descriptor) return &method;
    }
    return nullptr;
}

SmaliClass parse_smali_file(std::string_view text, const std::string& path) {
    SmaliClass result;
    result.source_path = path;

    SmaliMethod* current_method = nullptr;
    std::string skip_block;  // non-empty while inside .annotation / .array-data / switch payloads

    std::istringstream stream{std::string{text}};
    std::string raw_line;
    int line_number = 0;
    while (std::getline(stream, raw_line)) {
        ++line_number;
        if (!raw_line.empty() && raw_line.back() == '\r') raw_line.pop_back();
        std::string_view line = trim(strip_comment(raw_line));
        if (line.empty()) continue;

        if (!skip_block.empty()) {
            if (block_end_matches(line, skip_block)) skip_block.clear();
            continue;
        }

        if (line.front() == ':') continue;  // branch label

        if (line.front() == '.') {
            auto tokens = split_tokens(line);
            std::string_view directive = tokens[0];

            if (directive == ".class") {
                if (tokens.size() < 2 || !is_class_descriptor(tokens.back())) {
                    throw ParseError("malformed .class directive", path, line_number);
                }
                result.name = std::string{tokens.back()};
            } else if (directive == ".super") {
                if (tokens.size() != 2 || !is_class_descriptor(tokens[1])) {
                    throw ParseError("malformed .super directive", path, line_number);
                }
                result.super_name = std::string{tokens[1]};
            } else if (directive == ".implements") {
                if (tokens.size() != 2 || !is_class_descriptor(tokens[1])) {
                    throw ParseError("malformed .implements directive", path, line_number);
                }
                result.interfaces.emplace_back(tokens[1]);
            } else if (directive == ".method") {
                if (current_method != nullptr) {
                    throw ParseError("nested .method directive", path, line_number);
                }
                if (tokens.size() < 2) {
                    throw ParseError("malformed .method directive", path, line_number);
                }
                std::string_view signature = tokens.back();
                std::size_t paren = signature.find('(');
                if (paren == std::string_view::npos || paren == 0 ||
                    signature.find(')') == std::string_view::npos) {
                    throw ParseError("malformed method signature '" + std::string{signature} + "'",
                                     path, line_number);
                }
                SmaliMethod method;
                method.name = std::string{signature.substr(0, paren)};
                method.descriptor = std::string{signature.substr(paren)};
                method.line = line_number;
                for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
                    method.access_flags.emplace_back(tokens[i]);
                }
                result.methods.push_back(std::move(method));
                current_method = &result.methods.back();
            } else if (directive == ".end") {
                if (tokens.size() >= 2 && tokens[1] == "method") {
                    if (current_method == nullptr) {
                        throw ParseError(".end method outside a method", path, line_number);
                    }
                    current_method = nullptr;
                }
                // .end local / .end param and friends: ignore
            } else if (directive == ".annotation" || directive == ".subannotation") {
                skip_block = std::string{directive.substr(1)};
            } else if (directive == ".array-data" || directive == ".packed-switch" ||
                       directive == ".sparse-switch") {
                skip_block = std::string{directive.substr(1)};
            } else {
                // .locals, .registers, .line, .param, .field, .source, .catch, ...
            }
            continue;
        }

        // Anything else is an instruction and must live inside a method.
        if (current_method == nullptr) {
            throw ParseError("instruction outside method block: '" +
                                 std::string{first_word(line)} + "'",
                             path, line_number);
        }

        std::string_view opcode = first_word(line);
        Instruction instruction;
        instruction.line = line_number;

        if (opcode.starts_with("invoke-")) {
            std::string_view kind_part = opcode.substr(7);
            bool range = false;
            if (kind_part.ends_with("/range")) {
                range = true;
                kind_part = kind_part.substr(0, kind_part.size() - 6);
            }
            (void)range;  // range variants normalize to the base kind
            InvokeKind kind;
            bool recognized = true;
            if (kind_part == "virtual") {
                kind = InvokeKind::Virtual;
            } else if (kind_part == "static") {
                kind = InvokeKind::Static;
            } else if (kind_part == "direct") {
                kind = InvokeKind::Direct;
            } else if (kind_part == "interface") {
                kind = InvokeKind::Interface;
            } else {
                recognized = false;  // invoke-super, invoke-polymorphic, invoke-custom, ...
            }
            if (recognized) {
                std::size_t brace = line.find('}');
                if (brace == std::string_view::npos) {
                    throw ParseError("invoke without register list", path, line_number);
                }
                std::size_t comma = line.find(',', brace);
                if (comma == std::string_view::npos) {
                    throw ParseError("invoke without method reference", path, line_number);
                }
                MethodRef ref = parse_method_ref(trim(line.substr(comma + 1)), path, line_number);
                instruction.op = Invoke{kind, std::move(ref.class_name), std::move(ref.method_name),
                                        std::move(ref.descriptor)};
            } else {
                instruction.op = OtherOp{std::string{opcode}};
            }
        } else if (opcode == "new-instance") {
            auto tokens = split_tokens(line);
            if (tokens.size() < 3 || !is_class_descriptor(tokens.back())) {
                throw ParseError("malformed new-instance", path, line_number);
            }
            instruction.op = NewInstance{std::string{tokens.back()}};
        } else if (opcode == "const" || opcode == "const/high16" || opcode == "const/16") {
            auto tokens = split_tokens(line);
            if (tokens.size() < 3) {
                throw ParseError("malformed const", path, line_number);
            }
            instruction.op = ConstInt{parse_int_literal(tokens.back(), path, line_number)};
        } else {
            instruction.op = OtherOp{std::string{opcode}};
        }
        current_method->instructions.push_back(std::move(instruction));
    }

    if (current_method != nullptr) {
        throw ParseError("unterminated .method block", path, line_number);
    }
    if (result.name.empty()) {
        throw ParseError("missing .class directive", path, line_number);
    }
    return result;
}

std::string descriptor_to_java(std::string_view descriptor) {
    std::string_view body = descriptor;
    if (is_class_descriptor(body)) body = body.substr(1, body.size() - 2);
    std::string out{body};
    for (char& c : out) {
        if (c == '/') c = '.';
    }
    return out;
}

std::string java_to_descriptor(std::string_view dotted) {
    std::string out = "L";
    out += dotted;
    out += ';';
    for (char& c : out) {
        if (c == '.') c = '/';
    }
    return out;
}

}  // namespace iaudit
