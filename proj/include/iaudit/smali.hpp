#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "iaudit/model.hpp"

namespace iaudit {

enum class InvokeKind {
    Virtual,
    Static,
    Direct,
    Interface,
};

std::string_view to_string(InvokeKind kind);

struct Invoke {
    InvokeKind kind = InvokeKind::Virtual;
    std::string target_class;  // Lcom/example/Foo;
    std::string method_name;
    std::string descriptor;  // (Ljava/lang/String;)V

    bool operator==(const Invoke&) const = default;
};

struct NewInstance {
    std::string class_name;

    bool operator==(const NewInstance&) const = default;
};

struct ConstInt {
    std::int32_t value = 0;

    bool operator==(const ConstInt&) const = default;
};

struct OtherOp {
    std::string opcode;

    bool operator==(const OtherOp&) const = default;
};

struct Instruction {
    std::variant<Invoke, NewInstance, ConstInt, OtherOp> op;
    int line = 0;  // line in the .smali source

    const Invoke* invoke() const { return std::get_if<Invoke>(&op); }
    const NewInstance* new_instance() const { return std::get_if<NewInstance>(&op); }
    const ConstInt* const_int() const { return std::get_if<ConstInt>(&op); }
    const OtherOp* other() const { return std::get_if<OtherOp>(&op); }
};

struct SmaliMethod {
    std::string name;
    std::string descriptor;  // (<params>)<ret>
    std::vector<std::string> access_flags;
    std::vector<Instruction> instructions;
    int line = 0;

    bool is_constructor() const { return name == "<init>" || name == "<clinit>"; }
};

struct SmaliClass {
    std::string name;  // Lcom/example/Foo;  ('$' marks inner classes)
    std::string super_name;
    std::vector<std::string> interfaces;
    std::vector<SmaliMethod> methods;
    std::string source_path;

    const SmaliMethod* find_method(std::string_view name, std::string_view descriptor) const;
};

/// Parses one apktool-style smali file. Recognizes .class/.super/.implements,
/// .method blocks, the four classic invoke kinds (plus /range), new-instance
/// and const/const\/high16/const\/16; every other opcode becomes OtherOp.
/// Malformed directives throw ParseError with the offending line.
SmaliClass parse_smali_file(std::string_view text, const std::string& path);

/// "Lcom/example/Foo;" <-> "com.example.Foo"
std::string descriptor_to_java(std::string_view descriptor);
std::string java_to_descriptor(std::string_view dotted);

}  // namespace iaudit
