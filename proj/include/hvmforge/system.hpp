#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hvmforge/dist.hpp"
#include "hvmforge/errors.hpp"
#include "hvmforge/point.hpp"
#include "hvmforge/rational.hpp"

namespace hvmforge {

// A measured quantity together with its finite outcome alphabet.
struct Property {
    std::string id;
    std::vector<std::string> alphabet;

    friend bool operator==(const Property&, const Property&) = default;
};

// A set of recorded circumstances under which properties are measured
// together; `properties` lists the ids measured in this context in a
// fixed order.
struct Context {
    std::string id;
    std::vector<std::string> properties;

    friend bool operator==(const Context&, const Context&) = default;
};

// The property/context skeleton shared by systems and hidden variable
// models: which properties exist, what their outcomes are, and which
// properties each context measures.
class Structure {
  public:
    Structure(std::vector<Property> properties, std::vector<Context> contexts)
        : properties_(std::move(properties)), contexts_(std::move(contexts)) {
        if (properties_.empty()) throw ValidationError("no properties declared");
        if (contexts_.empty()) throw ValidationError("no contexts declared");
        for (std::size_t i = 0; i < properties_.size(); ++i) {
            const Property& p = properties_[i];
            if (p.alphabet.empty()) {
                throw ValidationError("property '" + p.id + "' has an empty alphabet");
            }
            std::set<std::string> outcomes(p.alphabet.begin(), p.alphabet.end());
            if (outcomes.size() != p.alphabet.size()) {
                throw ValidationError("property '" + p.id + "' repeats an outcome label");
            }
            if (!property_index_.emplace(p.id, i).second) {
                throw ValidationError("duplicate property id '" + p.id + "'");
            }
        }
        std::set<std::string> covered;
        for (std::size_t i = 0; i < contexts_.size(); ++i) {
            const Context& c = contexts_[i];
            if (c.properties.empty()) {
                throw ValidationError("context '" + c.id + "' lists no properties");
            }
            std::set<std::string> in_context;
            for (const std::string& q : c.properties) {
                if (!property_index_.contains(q)) {
                    throw ValidationError("context '" + c.id +
                                          "' references unknown property '" + q + "'");
                }
                if (!in_context.insert(q).second) {
                    throw ValidationError("context '" + c.id + "' repeats property '" + q +
                                          "'");
                }
                covered.insert(q);
            }
            if (!context_index_.emplace(c.id, i).second) {
                throw ValidationError("duplicate context id '" + c.id + "'");
            }
        }
        for (const Property& p : properties_) {
            if (!covered.contains(p.id)) {
                throw ValidationError("property '" + p.id + "' appears in no context");
            }
        }
    }

    const std::vector<Property>& properties() const { return properties_; }
    const std::vector<Context>& contexts() const { return contexts_; }

    bool has_property(const std::string& id) const { return property_index_.contains(id); }
    bool has_context(const std::string& id) const { return context_index_.contains(id); }

    const Property& property(const std::string& id) const {
        auto it = property_index_.find(id);
        if (it == property_index_.end()) throw UnknownKey("unknown property '" + id + "'");
        return properties_[it->second];
    }

    const Context& context(const std::string& id) const {
        auto it = context_index_.find(id);
        if (it == context_index_.end()) throw UnknownKey("unknown context '" + id + "'");
        return contexts_[it->second];
    }

    // Outcome labels as atom points, in alphabet order.
    std::vector<Point> outcome_points(const std::string& property_id) const {
        std::vector<Point> out;
        for (const std::string& label : property(property_id).alphabet) {
            out.push_back(Point::atom(label));
        }
        return out;
    }

    // Contexts measuring a given property, in declaration order.
    std::vector<std::string> contexts_of(const std::string& property_id) const {
        std::vector<std::string> out;
        for (const Context& c : contexts_) {
            for (const std::string& q : c.properties) {
                if (q == property_id) {
                    out.push_back(c.id);
                    break;
                }
            }
        }
        return out;
    }

    // Same property and context sets with identical alphabets and
    // per-context property lists; declaration order may differ.
    bool congruent(const Structure& other) const {
        if (properties_.size() != other.properties_.size()) return false;
        if (contexts_.size() != other.contexts_.size()) return false;
        for (const Property& p : properties_) {
            if (!other.has_property(p.id) || other.property(p.id).alphabet != p.alphabet) {
                return false;
            }
        }
        for (const Context& c : contexts_) {
            if (!other.has_context(c.id) || other.context(c.id).properties != c.properties) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const Structure& a, const Structure& b) {
        return a.properties_ == b.properties_ && a.contexts_ == b.contexts_;
    }

  private:
    std::vector<Property> properties_;
    std::vector<Context> contexts_;
    std::map<std::string, std::size_t> property_index_;
    std::map<std::string, std::size_t> context_index_;
};

// A system of random variables: one joint distribution of measured
// properties per context, with no cross-context joint given.
class System {
  public:
    System(Structure structure, std::map<std::string, JointDist> jointly)
        : structure_(std::move(structure)), jointly_(std::move(jointly)) {
        for (const Context& c : structure_.contexts()) {
            auto it = jointly_.find(c.id);
            if (it == jointly_.end()) {
                throw ValidationError("context '" + c.id + "' has no distribution");
            }
            const JointDist& j = it->second;
            if (j.keys() != c.properties) {
                throw ValidationError("distribution of context '" + c.id +
                                      "' is not keyed by its property list");
            }
            for (const std::string& q : c.properties) {
                if (j.component_alphabet(q) != structure_.outcome_points(q)) {
                    throw ValidationError("context '" + c.id + "': outcome alphabet of '" +
                                          q + "' does not match the property");
                }
            }
        }
        if (jointly_.size() != structure_.contexts().size()) {
            throw ValidationError("distribution given for an undeclared context");
        }
    }

    const Structure& structure() const { return structure_; }

    const JointDist& context_dist(const std::string& context_id) const {
        auto it = jointly_.find(context_id);
        if (it == jointly_.end()) throw UnknownKey("unknown context '" + context_id + "'");
        return it->second;
    }

    const std::map<std::string, JointDist>& jointly() const { return jointly_; }

    friend bool operator==(const System& a, const System& b) {
        return a.structure_ == b.structure_ && a.jointly_ == b.jointly_;
    }

  private:
    Structure structure_;
    std::map<std::string, JointDist> jointly_;
};

// One detected no-disturbance violation: a property whose exact marginal
// differs between two contexts measuring it.
struct MarginalViolation {
    std::string property;
    std::string context_a;
    std::string context_b;
    Dist marginal_a;
    Dist marginal_b;
};

struct SystemReport {
    bool consistent = true;
    std::vector<MarginalViolation> violations;
};

// No-disturbance (no-signaling) audit: for every property and every pair
// of contexts measuring it, compare the exact marginals. All mismatches
// are reported, not just the first.
inline SystemReport is_consistently_connected(const System& s) {
    SystemReport report;
    for (const Property& p : s.structure().properties()) {
        const std::vector<std::string> ctxs = s.structure().contexts_of(p.id);
        for (std::size_t i = 0; i < ctxs.size(); ++i) {
            for (std::size_t j = i + 1; j < ctxs.size(); ++j) {
                Dist a = project(s.context_dist(ctxs[i]), p.id);
                Dist b = project(s.context_dist(ctxs[j]), p.id);
                if (!dist_eq(a, b)) {
                    report.violations.push_back(
                        {p.id, ctxs[i], ctxs[j], std::move(a), std::move(b)});
                }
            }
        }
    }
    report.consistent = report.violations.empty();
    return report;
}

// The 4-cycle system over +/-1 outcomes with uniform marginals and the
// requested product expectation per context: properties q1..q4, contexts
// c1={q1,q2}, c2={q2,q3}, c3={q3,q4}, c4={q4,q1}. Cell masses are
// (1+e)/4 for equal outcome pairs and (1-e)/4 for unequal ones.
inline System cyclic4(const std::array<Rational, 4>& correlations) {
    for (const Rational& e : correlations) {
        if (e < -1 || e > 1) {
            throw OutOfRange("correlation " + format_rational(e) + " outside [-1, 1]");
        }
    }
    const std::vector<std::string> outcomes{"+1", "-1"};
    std::vector<Property> properties;
    for (int q = 1; q <= 4; ++q) {
        properties.push_back({"q" + std::to_string(q), outcomes});
    }
    std::vector<Context> contexts;
    for (int c = 1; c <= 4; ++c) {
        const int first = c;
        const int second = c % 4 + 1;
        contexts.push_back({"c" + std::to_string(c),
                            {"q" + std::to_string(first), "q" + std::to_string(second)}});
    }
    Structure structure(std::move(properties), std::move(contexts));

    std::map<std::string, JointDist> jointly;
    for (int c = 1; c <= 4; ++c) {
        const Context& ctx = structure.contexts()[static_cast<std::size_t>(c - 1)];
        const Rational& e = correlations[static_cast<std::size_t>(c - 1)];
        const Rational equal_mass = (1 + e) / 4;
        const Rational unequal_mass = (1 - e) / 4;
        std::map<Point, Rational> mass;
        for (const std::string& a : outcomes) {
            for (const std::string& b : outcomes) {
                Point cell = Point::record(
                    {{ctx.properties[0], Point::atom(a)}, {ctx.properties[1], Point::atom(b)}});
                mass.emplace(std::move(cell), a == b ? equal_mass : unequal_mass);
            }
        }
        std::map<std::string, std::vector<Point>> comps{
            {ctx.properties[0], structure.outcome_points(ctx.properties[0])},
            {ctx.properties[1], structure.outcome_points(ctx.properties[1])}};
        jointly.emplace(ctx.id, JointDist::dense(ctx.properties, std::move(comps), mass));
    }
    return System(std::move(structure), std::move(jointly));
}

}  // namespace hvmforge
