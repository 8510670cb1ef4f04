#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hvmforge/dist.hpp"
#include "hvmforge/errors.hpp"
#include "hvmforge/hvm.hpp"
#include "hvmforge/lp.hpp"
#include "hvmforge/point.hpp"
#include "hvmforge/rational.hpp"
#include "hvmforge/system.hpp"

namespace hvmforge {

// A global assignment: one outcome for every property of the system,
// as a record point keyed by property id. These are the hidden values
// of a delta-form model.
using GlobalAssignment = Point;

// The feasibility program behind the noncontextual-model decision: one
// variable per global assignment, one equality per (context, outcome
// tuple) cell, plus the normalization row. Kept as data so certificates
// can be re-checked against the very matrix the solver saw.
struct NcLp {
    std::vector<GlobalAssignment> assignments;  // column order
    std::vector<std::string> row_labels;        // "c1(+1,-1)", ..., "total"
    std::vector<std::vector<Rational>> rows;    // m x n, entries 0/1
    std::vector<Rational> rhs;
};

// An exact dual vector proving infeasibility: A^T y >= 0 and b^T y < 0
// for the NcLp it was produced from.
struct FarkasCertificate {
    std::vector<std::string> row_labels;
    std::vector<Rational> y;
};

inline bool check_farkas(const NcLp& lp, const std::vector<Rational>& y) {
    if (y.size() != lp.rows.size()) return false;
    Rational bty = 0;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) bty += lp.rhs[i] * y[i];
    if (bty >= 0) return false;
    for (std::size_t j = 0; j < lp.assignments.size(); ++j) {
        Rational dot = 0;
        for (std::size_t i = 0; i < lp.rows.size(); ++i) dot += lp.rows[i][j] * y[i];
        if (dot < 0) return false;
    }
    return true;
}

namespace detail {

inline std::string cell_label(const Context& c, const Point& tuple) {
    std::string label = c.id + "(";
    for (std::size_t i = 0; i < c.properties.size(); ++i) {
        if (i > 0) label += ',';
        label += tuple.at(c.properties[i]).label();
    }
    label += ')';
    return label;
}

}  // namespace detail

// Enumerates the global assignments (row-major over the property list)
// and assembles the cell equalities. Throws SizeLimit when the
// assignment count would exceed `assignment_cap`; the message names the
// count.
inline NcLp assemble_nc_lp(const System& s, std::size_t assignment_cap = 1'000'000) {
    const Structure& st = s.structure();

    BigInt count = 1;
    for (const Property& p : st.properties()) count *= p.alphabet.size();
    if (count > assignment_cap) {
        throw SizeLimit("global assignment count " + count.str() + " exceeds cap " +
                        std::to_string(assignment_cap));
    }

    NcLp lp;
    {
        std::vector<Point::Field> current;
        auto rec = [&](auto&& self, std::size_t depth) -> void {
            if (depth == st.properties().size()) {
                lp.assignments.push_back(Point::record(current));
                return;
            }
            const Property& p = st.properties()[depth];
            for (const std::string& label : p.alphabet) {
                current.emplace_back(p.id, Point::atom(label));
                self(self, depth + 1);
                current.pop_back();
            }
        };
        rec(rec, 0);
    }
    const std::size_t n = lp.assignments.size();

    for (const Context& c : st.contexts()) {
        const JointDist& joint = s.context_dist(c.id);
        // One equality per cell, in the dense row-major order of the
        // context's outcome-tuple alphabet.
        std::map<Point, std::size_t> row_of;
        for (const Point& tuple : product_points(c.properties, joint.components())) {
            row_of.emplace(tuple, lp.rows.size());
            lp.row_labels.push_back(detail::cell_label(c, tuple));
            lp.rows.emplace_back(n, Rational(0));
            lp.rhs.push_back(joint.mass(tuple));
        }
        for (std::size_t j = 0; j < n; ++j) {
            const Point restricted = lp.assignments[j].restricted_to(c.properties);
            lp.rows[row_of.at(restricted)][j] = 1;
        }
    }

    lp.row_labels.push_back("total");
    lp.rows.emplace_back(n, Rational(1));
    lp.rhs.push_back(Rational(1));
    return lp;
}

// Outcome of the noncontextual-model decision: either a witness model
// that reproduces the system exactly, or an exact infeasibility
// certificate.
class NcDecision {
  public:
    explicit NcDecision(NcHvm witness) : value_(std::move(witness)) {}
    explicit NcDecision(FarkasCertificate certificate) : value_(std::move(certificate)) {}

    bool feasible() const { return std::holds_alternative<NcHvm>(value_); }

    const NcHvm& witness() const {
        if (!feasible()) throw UnknownKey("infeasible decision has no witness");
        return std::get<NcHvm>(value_);
    }

    const FarkasCertificate& certificate() const {
        if (feasible()) throw UnknownKey("feasible decision has no certificate");
        return std::get<FarkasCertificate>(value_);
    }

  private:
    std::variant<NcHvm, FarkasCertificate> value_;
};

// Decides whether a noncontextual (delta-form) model of the system
// exists, by exact LP feasibility over distributions on global
// assignments. Both branches are verified before being returned.
inline NcDecision find_nc_hvm(const System& s, std::size_t assignment_cap = 1'000'000) {
    NcLp lp = assemble_nc_lp(s, assignment_cap);
    FeasibilityResult lp_result = solve_equality_feasibility(lp.rows, lp.rhs);

    if (!lp_result.feasible) {
        FarkasCertificate certificate{lp.row_labels, std::move(lp_result.farkas)};
        if (!check_farkas(lp, certificate.y)) {
            throw InternalError("nc-check: Farkas certificate failed re-validation");
        }
        return NcDecision(std::move(certificate));
    }

    std::map<Point, Rational> mass;
    std::vector<Point> support;
    for (std::size_t j = 0; j < lp.assignments.size(); ++j) {
        if (lp_result.solution[j] != 0) {
            support.push_back(lp.assignments[j]);
            mass.emplace(lp.assignments[j], lp_result.solution[j]);
        }
    }
    ResponseQ delta;
    for (const Point& g : support) {
        for (const auto& [q, outcome] : g.fields()) {
            delta[std::pair(q, g)] = outcome.label();
        }
    }
    NcHvm witness(s.structure(), Dist(std::move(support), std::move(mass)),
                  std::move(delta));
    if (!models(witness, s)) {
        throw InternalError("nc-check: witness failed re-validation");
    }
    return NcDecision(std::move(witness));
}

namespace detail {

inline std::optional<int> pm1_value(const std::string& label) {
    if (label == "+1" || label == "1") return 1;
    if (label == "-1") return -1;
    return std::nullopt;
}

// Requires: every context measures exactly two +/-1 properties, every
// property sits in exactly two contexts, and the incidence graph is one
// connected cycle.
inline void require_single_pm1_cycle(const System& s) {
    const Structure& st = s.structure();
    for (const Property& p : st.properties()) {
        if (p.alphabet.size() != 2) {
            throw ShapeError("property '" + p.id + "' is not binary");
        }
        std::set<int> values;
        for (const std::string& label : p.alphabet) {
            auto v = pm1_value(label);
            if (!v) {
                throw ShapeError("outcome '" + label + "' of property '" + p.id +
                                 "' is not a +/-1 label");
            }
            values.insert(*v);
        }
        if (values != std::set<int>{-1, 1}) {
            throw ShapeError("property '" + p.id + "' does not take both +1 and -1");
        }
        if (st.contexts_of(p.id).size() != 2) {
            throw ShapeError("property '" + p.id + "' is not in exactly two contexts");
        }
    }
    for (const Context& c : st.contexts()) {
        if (c.properties.size() != 2) {
            throw ShapeError("context '" + c.id + "' does not measure exactly two properties");
        }
    }
    if (st.contexts().size() != st.properties().size()) {
        throw ShapeError("context and property counts differ; not a single cycle");
    }
    // Connectivity: walk the context-property incidence graph.
    std::set<std::string> reached_contexts;
    std::set<std::string> frontier{st.contexts().front().id};
    while (!frontier.empty()) {
        std::set<std::string> next;
        for (const std::string& cid : frontier) {
            if (!reached_contexts.insert(cid).second) continue;
            for (const std::string& q : st.context(cid).properties) {
                for (const std::string& other : st.contexts_of(q)) {
                    if (!reached_contexts.contains(other)) next.insert(other);
                }
            }
        }
        frontier = std::move(next);
    }
    if (reached_contexts.size() != st.contexts().size()) {
        throw ShapeError("context-property graph is disconnected; not a single cycle");
    }
}

inline Rational context_expectation(const System& s, const Context& c) {
    Rational e = 0;
    const JointDist& joint = s.context_dist(c.id);
    for (const auto& [tuple, mass] : joint.dist().masses()) {
        const int va = *pm1_value(tuple.at(c.properties[0]).label());
        const int vb = *pm1_value(tuple.at(c.properties[1]).label());
        e += mass * va * vb;
    }
    return e;
}

}  // namespace detail

// Signed sum of per-context product expectations over a single-cycle
// +/-1 system: sum_c sign_c * <R_q R_q'>. Signs align with the system's
// context declaration order.
inline Rational cycle_functional(const System& s, const std::vector<int>& signs) {
    detail::require_single_pm1_cycle(s);
    if (signs.size() != s.structure().contexts().size()) {
        throw ShapeError("expected one sign per context");
    }
    Rational total = 0;
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] != 1 && signs[i] != -1) throw ShapeError("signs must be +1 or -1");
        total += Rational(signs[i]) *
                 detail::context_expectation(s, s.structure().contexts()[i]);
    }
    return total;
}

// Maximum of cycle_functional over all sign vectors with an odd number
// of minus signs (the standard cyclic Bell-functional family). The
// optimal signs are also reported for display purposes.
inline std::pair<Rational, std::vector<int>> cycle_max_with_signs(const System& s) {
    detail::require_single_pm1_cycle(s);
    const std::size_t n = s.structure().contexts().size();
    std::vector<Rational> expectations;
    expectations.reserve(n);
    for (const Context& c : s.structure().contexts()) {
        expectations.push_back(detail::context_expectation(s, c));
    }
    std::optional<Rational> best;
    std::vector<int> best_signs;
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        if (std::popcount(bits) % 2 == 0) continue;
        Rational value = 0;
        std::vector<int> signs(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (bits & (std::size_t{1} << i)) signs[i] = -1;
            value += Rational(signs[i]) * expectations[i];
        }
        if (!best || value > *best) {
            best = value;
            best_signs = std::move(signs);
        }
    }
    return {*best, std::move(best_signs)};
}

inline Rational cycle_max(const System& s) { return cycle_max_with_signs(s).first; }

}  // namespace hvmforge
