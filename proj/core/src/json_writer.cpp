#include "flowlab/json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace flowlab::io {

std::string format_g6(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value in report output");
    if (x == 0.0) x = 0.0; // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

Json& Json::set(const std::string& key, Json value) {
    auto* obj = std::get_if<Object>(&v_);
    if (!obj) throw std::logic_error("Json::set on a non-object");
    (*obj)[key] = std::move(value);
    return *this;
}

Json& Json::push(Json value) {
    auto* arr = std::get_if<Array>(&v_);
    if (!arr) throw std::logic_error("Json::push on a non-array");
    arr->push_back(std::move(value));
    return *this;
}

namespace {

void escape_to(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

} // namespace

void Json::dump_to(std::string& out) const {
    if (std::holds_alternative<std::nullptr_t>(v_)) {
        out += "null";
    } else if (const auto* b = std::get_if<bool>(&v_)) {
        out += *b ? "true" : "false";
    } else if (const auto* i = std::get_if<long long>(&v_)) {
        out += std::to_string(*i);
    } else if (const auto* d = std::get_if<double>(&v_)) {
        out += format_g6(*d);
    } else if (const auto* s = std::get_if<std::string>(&v_)) {
        escape_to(*s, out);
    } else if (const auto* arr = std::get_if<Array>(&v_)) {
        out += '[';
        bool first = true;
        for (const auto& item : *arr) {
            if (!first) out += ", ";
            first = false;
            item.dump_to(out);
        }
        out += ']';
    } else {
        const auto& obj = std::get<Object>(v_);
        out += '{';
        bool first = true;
        for (const auto& [key, value] : obj) {
            if (!first) out += ", ";
            first = false;
            escape_to(key, out);
            out += ": ";
            value.dump_to(out);
        }
        out += '}';
    }
}

std::string Json::dump() const {
    std::string out;
    dump_to(out);
    return out;
}

} // namespace flowlab::io
