#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "hvmforge/system.hpp"

#include "support/generators.hpp"

using namespace hvmforge;

namespace {

// Replace one context's joint in a cyclic-4 system.
System with_context_joint(const System& base, const std::string& context_id,
                          const std::map<Point, Rational>& mass) {
    const Context& c = base.structure().context(context_id);
    std::map<std::string, JointDist> jointly = base.jointly();
    jointly.erase(context_id);
    jointly.emplace(context_id,
                    JointDist::dense(c.properties,
                                     base.context_dist(context_id).components(), mass));
    return System(base.structure(), std::move(jointly));
}

Point cell(const std::string& qa, const char* va, const std::string& qb, const char* vb) {
    return Point::record({{qa, Point::atom(va)}, {qb, Point::atom(vb)}});
}

}  // namespace

TEST_CASE("structure validation names the offence") {
    CHECK_THROWS_AS(Structure({{"q1", {}}}, {{"c1", {"q1"}}}), ValidationError);
    CHECK_THROWS_AS(Structure({{"q1", {"a"}}, {"q1", {"a"}}}, {{"c1", {"q1"}}}),
                    ValidationError);
    CHECK_THROWS_AS(Structure({{"q1", {"a"}}}, {{"c1", {"q9"}}}), ValidationError);
    CHECK_THROWS_AS(Structure({{"q1", {"a"}}}, {{"c1", {"q1", "q1"}}}), ValidationError);
    CHECK_THROWS_AS(Structure({{"q1", {"a"}}, {"q2", {"a"}}}, {{"c1", {"q1"}}}),
                    ValidationError);
}

TEST_CASE("cyclic4 produces the PR box for e = (1,1,1,-1)") {
    const System s = cyclic4({Rational(1), Rational(1), Rational(1), Rational(-1)});
    for (const char* cid : {"c1", "c2", "c3"}) {
        const Context& c = s.structure().context(cid);
        const JointDist& j = s.context_dist(cid);
        CHECK(j.mass(cell(c.properties[0], "+1", c.properties[1], "+1")) == Rational(1, 2));
        CHECK(j.mass(cell(c.properties[0], "-1", c.properties[1], "-1")) == Rational(1, 2));
        CHECK(j.mass(cell(c.properties[0], "+1", c.properties[1], "-1")) == 0);
    }
    const JointDist& j4 = s.context_dist("c4");
    CHECK(j4.mass(cell("q4", "+1", "q1", "-1")) == Rational(1, 2));
    CHECK(j4.mass(cell("q4", "-1", "q1", "+1")) == Rational(1, 2));
    CHECK(j4.mass(cell("q4", "+1", "q1", "+1")) == 0);
}

TEST_CASE("cyclic4 with all correlations 1 sits on the diagonal") {
    const System s = cyclic4({Rational(1), Rational(1), Rational(1), Rational(1)});
    for (const Context& c : s.structure().contexts()) {
        const JointDist& j = s.context_dist(c.id);
        CHECK(j.mass(cell(c.properties[0], "+1", c.properties[1], "+1")) == Rational(1, 2));
        CHECK(j.mass(cell(c.properties[0], "-1", c.properties[1], "-1")) == Rational(1, 2));
    }
}

TEST_CASE("cyclic4 with zero correlations is uniform") {
    const System s = cyclic4({Rational(0), Rational(0), Rational(0), Rational(0)});
    for (const Context& c : s.structure().contexts()) {
        for (const Point& p : s.context_dist(c.id).dist().alphabet()) {
            CHECK(s.context_dist(c.id).mass(p) == Rational(1, 4));
        }
    }
}

TEST_CASE("cyclic4 rejects out-of-range correlations") {
    CHECK_THROWS_AS(cyclic4({Rational(3, 2), Rational(0), Rational(0), Rational(0)}),
                    OutOfRange);
    CHECK_THROWS_AS(cyclic4({Rational(0), Rational(0), Rational(0), Rational(-2)}),
                    OutOfRange);
}

TEST_CASE("cyclic4 cell masses recompute the requested expectations") {
    gen::Rng rng(201);
    for (int trial = 0; trial < 100; ++trial) {
        const std::array<Rational, 4> e{
            gen::random_correlation(rng), gen::random_correlation(rng),
            gen::random_correlation(rng), gen::random_correlation(rng)};
        const System s = cyclic4(e);
        for (std::size_t i = 0; i < 4; ++i) {
            const Context& c = s.structure().contexts()[i];
            const JointDist& j = s.context_dist(c.id);
            CHECK(j.mass(cell(c.properties[0], "+1", c.properties[1], "+1")) ==
                  (1 + e[i]) / 4);
            CHECK(j.mass(cell(c.properties[0], "+1", c.properties[1], "-1")) ==
                  (1 - e[i]) / 4);
            Rational expectation = 0;
            for (const auto& [tuple, mass] : j.dist().masses()) {
                const int va = tuple.at(c.properties[0]).label() == "+1" ? 1 : -1;
                const int vb = tuple.at(c.properties[1]).label() == "+1" ? 1 : -1;
                expectation += mass * va * vb;
            }
            CHECK(expectation == e[i]);
        }
    }
}

TEST_CASE("the PR box is consistently connected") {
    const System s = cyclic4({Rational(1), Rational(1), Rational(1), Rational(-1)});
    const SystemReport report = is_consistently_connected(s);
    CHECK(report.consistent);
    CHECK(report.violations.empty());
    // Oracle: all eight marginals are uniform.
    const Dist uniform = Dist::uniform({Point::atom("+1"), Point::atom("-1")});
    for (const Context& c : s.structure().contexts()) {
        for (const std::string& q : c.properties) {
            CHECK(dist_eq(project(s.context_dist(c.id), q), uniform));
        }
    }
}

TEST_CASE("a perturbed marginal is reported with its context pair") {
    const System base = cyclic4({Rational(0), Rational(0), Rational(0), Rational(0)});
    // q1 marginal becomes (3/4, 1/4) in c1; c4 keeps it uniform.
    const System s = with_context_joint(
        base, "c1",
        {{cell("q1", "+1", "q2", "+1"), Rational(3, 8)},
         {cell("q1", "+1", "q2", "-1"), Rational(3, 8)},
         {cell("q1", "-1", "q2", "+1"), Rational(1, 8)},
         {cell("q1", "-1", "q2", "-1"), Rational(1, 8)}});
    const SystemReport report = is_consistently_connected(s);
    REQUIRE_FALSE(report.consistent);
    REQUIRE(report.violations.size() == 1);
    const MarginalViolation& v = report.violations.front();
    CHECK(v.property == "q1");
    CHECK(v.context_a == "c1");
    CHECK(v.context_b == "c4");
    CHECK(v.marginal_a.mass(Point::atom("+1")) == Rational(3, 4));
    CHECK(v.marginal_b.mass(Point::atom("+1")) == Rational(1, 2));
}

TEST_CASE("a single-context system is vacuously consistent") {
    Structure st({{"q1", {"a", "b"}}, {"q2", {"x", "y"}}}, {{"c1", {"q1", "q2"}}});
    std::map<std::string, std::vector<Point>> comps{
        {"q1", st.outcome_points("q1")}, {"q2", st.outcome_points("q2")}};
    std::map<Point, Rational> mass{
        {Point::record({{"q1", Point::atom("a")}, {"q2", Point::atom("x")}}), Rational(1)}};
    std::map<std::string, JointDist> jointly;
    jointly.emplace("c1", JointDist::dense({"q1", "q2"}, comps, mass));
    const System s(st, std::move(jointly));
    CHECK(is_consistently_connected(s).consistent);
}

TEST_CASE("every cyclic4 system is consistently connected") {
    gen::Rng rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        CHECK(is_consistently_connected(gen::random_cyclic4(rng)).consistent);
    }
}

TEST_CASE("random signaling systems are flagged") {
    gen::Rng rng(203);
    for (int trial = 0; trial < 50; ++trial) {
        CHECK_FALSE(is_consistently_connected(gen::random_signaling(rng)).consistent);
    }
}

TEST_CASE("system constructor cross-checks contexts and distributions") {
    Structure st({{"q1", {"a", "b"}}}, {{"c1", {"q1"}}});
    std::map<std::string, JointDist> empty;
    CHECK_THROWS_AS(System(st, std::move(empty)), ValidationError);

    std::map<std::string, std::vector<Point>> wrong_comps{
        {"q1", {Point::atom("a"), Point::atom("c")}}};
    std::map<Point, Rational> mass{
        {Point::record({{"q1", Point::atom("a")}}), Rational(1)}};
    std::map<std::string, JointDist> jointly;
    jointly.emplace("c1", JointDist::dense({"q1"}, wrong_comps, mass));
    CHECK_THROWS_AS(System(st, std::move(jointly)), ValidationError);
}
