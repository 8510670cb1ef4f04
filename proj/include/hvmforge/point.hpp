#pragma once

#include <algorithm>
#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hvmforge/errors.hpp"

namespace hvmforge {

// A point of a finite alphabet. Either an atom (an opaque label) or a
// record: a key-sorted list of named components, themselves points.
// Records serve both as outcome tuples (keyed by property id), as
// coupling values (keyed by context id), and as partial outcome
// assignments, so one representation covers all composite values that
// arise from the constructions in this library.
class Point {
  public:
    using Field = std::pair<std::string, Point>;

    Point() : kind_(Kind::Atom) {}

    static Point atom(std::string label) {
        Point p;
        p.kind_ = Kind::Atom;
        p.label_ = std::move(label);
        return p;
    }

    static Point record(std::vector<Field> fields) {
        Point p;
        p.kind_ = Kind::Record;
        std::sort(fields.begin(), fields.end(),
                  [](const Field& a, const Field& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i - 1].first == fields[i].first) {
                throw ValidationError("duplicate record key '" + fields[i].first + "'");
            }
        }
        p.fields_ = std::move(fields);
        return p;
    }

    bool is_atom() const { return kind_ == Kind::Atom; }
    bool is_record() const { return kind_ == Kind::Record; }

    const std::string& label() const {
        if (!is_atom()) throw UnknownKey("label() called on a record point");
        return label_;
    }

    const std::vector<Field>& fields() const {
        if (!is_record()) throw UnknownKey("fields() called on an atom point");
        return fields_;
    }

    bool has(std::string_view key) const {
        return is_record() && find(key) != nullptr;
    }

    // Component lookup; total on declared components only.
    const Point& at(std::string_view key) const {
        if (const Point* p = is_record() ? find(key) : nullptr) return *p;
        throw UnknownKey("point has no component '" + std::string(key) + "'");
    }

    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        out.reserve(fields().size());
        for (const auto& [k, v] : fields()) out.push_back(k);
        return out;
    }

    // Sub-record over the given keys; every key must be present.
    Point restricted_to(std::span<const std::string> keys) const {
        std::vector<Field> sub;
        sub.reserve(keys.size());
        for (const auto& k : keys) sub.emplace_back(k, at(k));
        return record(std::move(sub));
    }

    friend bool operator==(const Point& a, const Point& b) {
        return a.kind_ == b.kind_ && a.label_ == b.label_ && a.fields_ == b.fields_;
    }

    // Total order: atoms before records, then lexicographic. Used for
    // map keys and for canonical orderings of constructed alphabets.
    friend std::strong_ordering operator<=>(const Point& a, const Point& b) {
        if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
        if (a.kind_ == Kind::Atom) return a.label_ <=> b.label_;
        return std::lexicographical_compare_three_way(
            a.fields_.begin(), a.fields_.end(), b.fields_.begin(), b.fields_.end(),
            [](const Field& x, const Field& y) {
                if (auto c = x.first <=> y.first; c != 0) return c;
                return x.second <=> y.second;
            });
    }

    // "label" for atoms, "{k1:v1, k2:v2}" for records.
    std::string to_string() const {
        if (is_atom()) return label_;
        std::string out = "{";
        bool first = true;
        for (const auto& [k, v] : fields_) {
            if (!first) out += ", ";
            first = false;
            out += k;
            out += ':';
            out += v.to_string();
        }
        out += '}';
        return out;
    }

  private:
    enum class Kind { Atom, Record };

    const Point* find(std::string_view key) const {
        auto it = std::lower_bound(
            fields_.begin(), fields_.end(), key,
            [](const Field& f, std::string_view k) { return f.first < k; });
        if (it != fields_.end() && it->first == key) return &it->second;
        return nullptr;
    }

    Kind kind_;
    std::string label_;
    std::vector<Field> fields_;
};

}  // namespace hvmforge
