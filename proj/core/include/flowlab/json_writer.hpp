#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace flowlab::io {

/// "%.6g" with the C locale; the one float format used in every report so
/// that byte-identical output is reproducible.
std::string format_g6(double x);

/// Minimal JSON value with canonical serialization: object keys sorted,
/// doubles rendered with format_g6, no insignificant whitespace beyond one
/// space after ':' and ','. Parsing a dump and dumping again is the identity.
class Json {
public:
    Json() : v_(nullptr) {}

    static Json object() { return Json(Object{}); }
    static Json array() { return Json(Array{}); }
    static Json number(double x) { return Json(x); }
    static Json integer(long long x) { return Json(x); }
    static Json boolean(bool b) { return Json(b); }
    static Json string(std::string s) { return Json(std::move(s)); }
    static Json null() { return Json(); }

    Json& set(const std::string& key, Json value);
    Json& push(Json value);

    std::string dump() const;

private:
    using Object = std::map<std::string, Json>;
    using Array = std::vector<Json>;
    using Value = std::variant<std::nullptr_t, bool, long long, double, std::string, Array, Object>;

    template <typename T>
    explicit Json(T v) : v_(std::move(v)) {}

    void dump_to(std::string& out) const;

    Value v_;
};

} // namespace flowlab::io
