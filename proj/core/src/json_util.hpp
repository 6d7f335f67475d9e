#pragma once

// Strict JSON object reading: every key must be consumed, otherwise the
// object is rejected. Internal to the library (nlohmann is not a public
// dependency).

#include "powerloc/types.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>

namespace powerloc::detail {

using nlohmann::json;

class ObjectReader {
  public:
    ObjectReader(const json& value, std::string context) : value_(value), context_(std::move(context)) {
        if (!value_.is_object()) {
            throw FormatError(context_ + ": expected a JSON object");
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return value_.contains(key); }

    /// Reads `key` into `out` when present.
    template <typename T>
    void get(const std::string& key, T& out) {
        if (!value_.contains(key)) {
            return;
        }
        seen_.insert(key);
        try {
            out = value_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw FormatError(context_ + "." + key + ": " + e.what());
        }
    }

    template <typename T>
    void get_optional(const std::string& key, std::optional<T>& out) {
        if (!value_.contains(key)) {
            return;
        }
        seen_.insert(key);
        if (value_.at(key).is_null()) {
            out.reset();
            return;
        }
        try {
            out = value_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw FormatError(context_ + "." + key + ": " + e.what());
        }
    }

    template <typename T>
    [[nodiscard]] T require(const std::string& key) {
        if (!value_.contains(key)) {
            throw FormatError(context_ + ": missing key '" + key + "'");
        }
        T out{};
        get(key, out);
        return out;
    }

    /// The raw child value, or nullptr when absent.
    [[nodiscard]] const json* child(const std::string& key) {
        if (!value_.contains(key)) {
            return nullptr;
        }
        seen_.insert(key);
        return &value_.at(key);
    }

    [[nodiscard]] const std::string& context() const { return context_; }

    void finish() const {
        for (const auto& [key, v] : value_.items()) {
            if (!seen_.contains(key)) {
                throw FormatError(context_ + ": unknown key '" + key + "'");
            }
        }
    }

  private:
    const json& value_;
    std::string context_;
    std::set<std::string> seen_;
};

}  // namespace powerloc::detail
