#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ccql {

// Failure families. The CLI maps them onto its exit codes: syntax -> 1,
// validation -> 2, adapter -> 3, data -> 2 (bad config or fixture input).
enum class ErrorCode {
    Syntax,
    Validation,
    Adapter,
    Data,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Statement text does not match the grammar. Carries the 1-based character
// offset of the failure and what the parser expected there.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::string expected, const std::string& found)
        : Error(ErrorCode::Syntax,
                "syntax error at offset " + std::to_string(offset) + ": expected " +
                    expected + ", found " + found),
          offset_(offset),
          expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

class UnknownClass : public Error {
public:
    explicit UnknownClass(const std::string& name)
        : Error(ErrorCode::Validation, "unknown class: " + name), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnknownAttribute : public Error {
public:
    UnknownAttribute(const std::string& class_name, const std::string& attr_name)
        : Error(ErrorCode::Validation,
                "unknown attribute: " + class_name + "." + attr_name),
          class_name_(class_name),
          attr_name_(attr_name) {}
    const std::string& class_name() const noexcept { return class_name_; }
    const std::string& attr_name() const noexcept { return attr_name_; }

private:
    std::string class_name_;
    std::string attr_name_;
};

class UnknownSource : public Error {
public:
    explicit UnknownSource(const std::string& source)
        : Error(ErrorCode::Validation, "unknown source: " + source) {}
};

// A query attribute whose class no selected source can emit.
class InapplicableAttribute : public Error {
public:
    explicit InapplicableAttribute(const std::string& attr)
        : Error(ErrorCode::Validation, "attribute applicable to no source: " + attr) {}
};

// An unprefixed filter attribute that more than one source could satisfy.
class AmbiguousFilterAttribute : public Error {
public:
    explicit AmbiguousFilterAttribute(const std::string& attr)
        : Error(ErrorCode::Validation,
                "filter attribute " + attr +
                    " is applicable to several sources; prefix it with a source index") {}
};

class TypeMismatch : public Error {
public:
    explicit TypeMismatch(const std::string& what)
        : Error(ErrorCode::Validation, "type mismatch: " + what) {}
};

class UnknownColumn : public Error {
public:
    explicit UnknownColumn(const std::string& what)
        : Error(ErrorCode::Validation, "unknown column: " + what) {}
};

class AdapterUnavailable : public Error {
public:
    explicit AdapterUnavailable(const std::string& what)
        : Error(ErrorCode::Adapter, "adapter unavailable: " + what) {}
};

class NotFound : public Error {
public:
    explicit NotFound(const std::string& what)
        : Error(ErrorCode::Adapter, "not found: " + what) {}
};

// Entity kind the chain's data model does not support: e.g. an account
// anchor on a pure UTXO chain.
class UnsupportedByChain : public Error {
public:
    explicit UnsupportedByChain(const std::string& what)
        : Error(ErrorCode::Adapter, "unsupported by chain: " + what) {}
};

// A fixture or config file that is not well-formed at the document level.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what)
        : Error(ErrorCode::Data, "parse error: " + what) {}
};

// A well-formed fixture that violates a chain invariant. `category` names the
// violated invariant, `record` the offending record.
class IntegrityError : public Error {
public:
    IntegrityError(std::string category, std::string record)
        : Error(ErrorCode::Data, "integrity error [" + category + "]: " + record),
          category_(std::move(category)),
          record_(std::move(record)) {}
    const std::string& category() const noexcept { return category_; }
    const std::string& record() const noexcept { return record_; }

private:
    std::string category_;
    std::string record_;
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& what)
        : Error(ErrorCode::Validation, "invalid parameters: " + what) {}
};

}  // namespace ccql
