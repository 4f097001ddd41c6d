#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"

namespace cartan {

inline bool is_identifier(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

// Ordered coordinate names of a local chart. Coordinate i is polynomial variable i.
class Chart {
public:
    explicit Chart(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (!is_identifier(names_[i])) throw UsageError("invalid coordinate name: '" + names_[i] + "'");
            if (!index_.emplace(names_[i], i).second) throw UsageError("duplicate coordinate: " + names_[i]);
        }
    }

    std::size_t dim() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<std::size_t> index(const std::string& n) const {
        auto it = index_.find(n);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Variables past the chart are internal parameters.
    VariableNamer namer() const {
        return [this](std::size_t i) { return i < names_.size() ? names_[i] : "_t" + std::to_string(i - names_.size()); };
    }

    friend bool operator==(const Chart& a, const Chart& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::vector<std::string> names) { return std::make_shared<const Chart>(std::move(names)); }

// x1 .. xn
inline ChartPtr numbered_chart(std::size_t n, const std::string& stem = "x") {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= n; ++i) names.push_back(stem + std::to_string(i));
    return make_chart(std::move(names));
}

inline bool same_chart(const ChartPtr& a, const ChartPtr& b) { return a == b || (a && b && *a == *b); }

inline void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
    if (!same_chart(a, b)) throw DomainError("chart mismatch");
}

}  // namespace cartan
