#include "tracelab/json_out.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string_view>

namespace tracelab {

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
    if (!is_object()) throw std::logic_error("JsonValue::set on non-object");
    auto& obj = std::get<Object>(value_);
    for (auto& [k, existing] : obj) {
        if (k == key) {
            existing = std::move(v);
            return *this;
        }
    }
    obj.emplace_back(key, std::move(v));
    return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
    if (!is_array()) throw std::logic_error("JsonValue::push on non-array");
    std::get<Array>(value_).push_back(std::move(v));
    return *this;
}

namespace {

void dump_string(const std::string& s, std::string& out) {
    out += '"';
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
}

void dump_double(double v, std::string& out) {
    if (!std::isfinite(v)) {
        // JSON has no infinities; emit a string marker
        out += v > 0 ? "\"inf\"" : (v < 0 ? "\"-inf\"" : "\"nan\"");
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
    // keep the value a float on reparse
    std::string_view sv(buf);
    if (sv.find('.') == std::string_view::npos && sv.find('e') == std::string_view::npos &&
        sv.find("inf") == std::string_view::npos && sv.find("nan") == std::string_view::npos) {
        out += ".0";
    }
}

}  // namespace

void JsonValue::dump_to(std::string& out) const {
    struct Visitor {
        std::string& out;
        void operator()(std::nullptr_t) const { out += "null"; }
        void operator()(bool b) const { out += b ? "true" : "false"; }
        void operator()(std::int64_t v) const { out += std::to_string(v); }
        void operator()(double v) const { dump_double(v, out); }
        void operator()(const std::string& s) const { dump_string(s, out); }
        void operator()(const Array& a) const {
            out += '[';
            bool first = true;
            for (const auto& v : a) {
                if (!first) out += ',';
                first = false;
                v.dump_to(out);
            }
            out += ']';
        }
        void operator()(const Object& o) const {
            out += '{';
            bool first = true;
            for (const auto& [k, v] : o) {
                if (!first) out += ',';
                first = false;
                dump_string(k, out);
                out += ':';
                v.dump_to(out);
            }
            out += '}';
        }
    };
    std::visit(Visitor{out}, value_);
}

std::string JsonValue::dump() const {
    std::string out;
    dump_to(out);
    return out;
}

JsonValue json_complex(cplx v) {
    JsonValue arr = JsonValue::array();
    arr.push(v.real());
    arr.push(v.imag());
    return arr;
}

}  // namespace tracelab
