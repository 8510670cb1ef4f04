#pragma once

#include <array>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hvmforge/dist.hpp"
#include "hvmforge/hvm.hpp"
#include "hvmforge/point.hpp"
#include "hvmforge/rational.hpp"
#include "hvmforge/system.hpp"

namespace hvmforge {

inline System pr_box_system() { return cyclic4({Rational(1), Rational(1), Rational(1), Rational(-1)}); }

inline System classical_system() { return cyclic4({Rational(1), Rational(1), Rational(1), Rational(1)}); }

// Free-choice model of the PR box: one fair +/-1 hidden coin, echoed by
// every response except q4 in context c4, which flips it. Realizes
// cyclic4(1, 1, 1, -1) in all four contexts.
inline FcHvm pr_box_fc_hvm() {
    System s = pr_box_system();
    const Structure& st = s.structure();
    Dist hidden = Dist::uniform({Point::atom("+1"), Point::atom("-1")});
    auto flipped = [](const std::string& label) { return label == "+1" ? "-1" : "+1"; };
    ResponseQC gamma;
    for (const Context& c : st.contexts()) {
        for (const std::string& q : c.properties) {
            for (const Point& lambda : hidden.alphabet()) {
                const bool flip = q == "q4" && c.id == "c4";
                gamma[std::tuple(q, c.id, lambda)] =
                    flip ? flipped(lambda.label()) : lambda.label();
            }
        }
    }
    return FcHvm(st, std::move(hidden), std::move(gamma));
}

// Noncontextual model of cyclic4(1, 1, 1, 1): half the mass on the
// all-plus global assignment, half on the all-minus one.
inline NcHvm classical_nc_hvm() {
    System s = classical_system();
    const Structure& st = s.structure();
    std::vector<Point> assignments;
    for (const std::string label : {"+1", "-1"}) {
        std::vector<Point::Field> fields;
        for (const Property& p : st.properties()) {
            fields.emplace_back(p.id, Point::atom(label));
        }
        assignments.push_back(Point::record(std::move(fields)));
    }
    Dist hidden = Dist::uniform(assignments);
    ResponseQ delta;
    for (const Point& g : assignments) {
        for (const Property& p : st.properties()) {
            delta[std::pair(p.id, g)] = g.at(p.id).label();
        }
    }
    return NcHvm(st, std::move(hidden), std::move(delta));
}

}  // namespace hvmforge
