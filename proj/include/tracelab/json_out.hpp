#pragma once

/**
 * @file json_out.hpp
 * @brief Minimal ordered JSON value for machine-readable output.
 *
 * Object keys keep insertion order and doubles are printed with 17
 * significant digits, so identical data always dumps to identical bytes.
 */

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tracelab/fp_core.hpp"

namespace tracelab {

class JsonValue {
public:
    using Array = std::vector<JsonValue>;
    using Object = std::vector<std::pair<std::string, JsonValue>>;

    JsonValue() : value_(nullptr) {}
    JsonValue(std::nullptr_t) : value_(nullptr) {}
    JsonValue(bool b) : value_(b) {}
    JsonValue(int v) : value_(static_cast<std::int64_t>(v)) {}
    JsonValue(unsigned v) : value_(static_cast<std::int64_t>(v)) {}
    JsonValue(std::int64_t v) : value_(v) {}
    JsonValue(std::uint64_t v) : value_(static_cast<std::int64_t>(v)) {}
    JsonValue(double v) : value_(v) {}
    JsonValue(const char* s) : value_(std::string(s)) {}
    JsonValue(std::string s) : value_(std::move(s)) {}
    JsonValue(Array a) : value_(std::move(a)) {}
    JsonValue(Object o) : value_(std::move(o)) {}

    static JsonValue object() { return JsonValue(Object{}); }
    static JsonValue array() { return JsonValue(Array{}); }

    /// Append or overwrite a key (object only).
    JsonValue& set(const std::string& key, JsonValue v);
    /// Append an element (array only).
    JsonValue& push(JsonValue v);

    bool is_object() const { return std::holds_alternative<Object>(value_); }
    bool is_array() const { return std::holds_alternative<Array>(value_); }

    std::string dump() const;
    void dump_to(std::string& out) const;

private:
    std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Array, Object> value_;
};

/// [re, im] pair used for all complex output.
JsonValue json_complex(cplx v);

}  // namespace tracelab
