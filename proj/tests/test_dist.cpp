#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "hvmforge/dist.hpp"
#include "hvmforge/errors.hpp"

#include "support/generators.hpp"

using namespace hvmforge;

namespace {

Point a() { return Point::atom("a"); }
Point b() { return Point::atom("b"); }

Dist uniform_ab() { return Dist::uniform({a(), b()}); }

// The four +/-1 sign pairs as record points keyed by position.
std::vector<Point> sign_pairs() {
    std::vector<Point> out;
    for (const char* x : {"+1", "-1"}) {
        for (const char* y : {"+1", "-1"}) {
            out.push_back(Point::record({{"i1", Point::atom(x)}, {"i2", Point::atom(y)}}));
        }
    }
    return out;
}

int sign_of(const Point& atom) { return atom.label() == "+1" ? 1 : -1; }

}  // namespace

TEST_CASE("dist construction validates its invariants") {
    CHECK_THROWS_AS(Dist({a(), a()}, {{a(), Rational(1)}}), ValidationError);
    CHECK_THROWS_AS(Dist({a(), b()}, {{a(), Rational(1, 2)}}), ValidationError);
    CHECK_THROWS_AS(Dist({a()}, {{a(), Rational(1, 2)}, {b(), Rational(1, 2)}}),
                    ValidationError);
    CHECK_THROWS_AS(Dist({a(), b()}, {{a(), Rational(3, 2)}, {b(), Rational(-1, 2)}}),
                    ValidationError);
    const Dist d = uniform_ab();
    CHECK(d.mass(a()) == Rational(1, 2));
    CHECK(d.mass(Point::atom("zzz")) == 0);
}

TEST_CASE("pushforward through the identity returns the same distribution") {
    const Dist d = uniform_ab();
    const Dist out = pushforward(d, [](const Point& p) { return p; });
    CHECK(dist_eq(out, d));
    CHECK(out.alphabet() == d.alphabet());
}

TEST_CASE("pushforward through a constant map gives a point mass") {
    const Dist out = pushforward(uniform_ab(), [](const Point&) { return Point::atom("a"); });
    CHECK(dist_eq(out, Dist::point_mass(a())));
}

TEST_CASE("pushforward of uniform sign pairs through the product is uniform") {
    const Dist d = Dist::uniform(sign_pairs());
    // Independent oracle: enumerate the four pairs and tally parities.
    std::map<Point, Rational> expected;
    for (const Point& pair : sign_pairs()) {
        const int parity = sign_of(pair.at("i1")) * sign_of(pair.at("i2"));
        expected[Point::atom(parity > 0 ? "+1" : "-1")] += Rational(1, 4);
    }
    REQUIRE(expected.size() == 2);
    REQUIRE(expected.at(Point::atom("+1")) == Rational(1, 2));

    const Dist out = pushforward(d, [](const Point& pair) {
        const int parity = sign_of(pair.at("i1")) * sign_of(pair.at("i2"));
        return Point::atom(parity > 0 ? "+1" : "-1");
    });
    CHECK(dist_eq(out, Dist({Point::atom("+1"), Point::atom("-1")}, expected)));
}

TEST_CASE("pushforward rejects maps that miss an alphabet point") {
    std::map<Point, Point> table{{a(), a()}};
    CHECK_THROWS_AS(pushforward(uniform_ab(), table), UndefinedOnSupport);
    // Zero-mass alphabet points still need a value.
    const Dist skewed({a(), b()}, {{a(), Rational(1)}});
    CHECK_THROWS_AS(pushforward(skewed, table), UndefinedOnSupport);
}

TEST_CASE("product coupling of a uniform factor and a point mass") {
    const JointDist j = product_coupling(
        {{"c1", uniform_ab()}, {"c2", Dist::point_mass(Point::atom("x"))}});
    CHECK(j.mass(Point::record({{"c1", a()}, {"c2", Point::atom("x")}})) == Rational(1, 2));
    CHECK(j.mass(Point::record({{"c1", b()}, {"c2", Point::atom("x")}})) == Rational(1, 2));
    CHECK(j.dist().masses().size() == 2);
}

TEST_CASE("product coupling of a single point mass") {
    const JointDist j = product_coupling({{"c1", Dist::point_mass(a())}});
    CHECK(j.mass(Point::record({{"c1", a()}})) == 1);
}

TEST_CASE("product coupling multiplies component masses") {
    const Dist d1({a(), b()}, {{a(), Rational(2, 3)}, {b(), Rational(1, 3)}});
    const Dist d2 = Dist::uniform({Point::atom("x"), Point::atom("y")});
    const JointDist j = product_coupling({{"c1", d1}, {"c2", d2}});
    CHECK(j.mass(Point::record({{"c1", a()}, {"c2", Point::atom("x")}})) == Rational(1, 3));
    Rational total = 0;
    for (const auto& [p, m] : j.dist().masses()) total += m;
    CHECK(total == 1);
    CHECK(j.dist().masses().size() == 4);
}

TEST_CASE("coupling of nothing is rejected") {
    CHECK_THROWS_AS(product_coupling({}), EmptyInput);
    CHECK_THROWS_AS(monotone_coupling({}), EmptyInput);
}

TEST_CASE("projection recovers coupling factors exactly") {
    const Dist d1({a(), b()}, {{a(), Rational(5, 7)}, {b(), Rational(2, 7)}});
    const Dist d2 = Dist::uniform({Point::atom("x"), Point::atom("y"), Point::atom("z")});
    const JointDist j = product_coupling({{"k1", d1}, {"k2", d2}});
    CHECK(dist_eq(project(j, "k1"), d1));
    CHECK(dist_eq(project(j, "k2"), d2));
    CHECK_THROWS_AS(project(j, "k3"), UnknownKey);
}

TEST_CASE("projection of a two-point diagonal joint") {
    std::map<std::string, std::vector<Point>> comps{
        {"k1", {Point::atom("+1"), Point::atom("-1")}},
        {"k2", {Point::atom("+1"), Point::atom("-1")}}};
    std::map<Point, Rational> mass{
        {Point::record({{"k1", Point::atom("+1")}, {"k2", Point::atom("+1")}}),
         Rational(1, 2)},
        {Point::record({{"k1", Point::atom("-1")}, {"k2", Point::atom("-1")}}),
         Rational(1, 2)}};
    const JointDist j = JointDist::sparse({"k1", "k2"}, comps, mass);
    CHECK(dist_eq(project(j, "k1"),
                  Dist::uniform({Point::atom("+1"), Point::atom("-1")})));
}

TEST_CASE("projection of a point mass is a point mass") {
    const JointDist j = product_coupling(
        {{"k1", Dist::point_mass(a())}, {"k2", Dist::point_mass(Point::atom("x"))}});
    CHECK(dist_eq(project(j, "k2"), Dist::point_mass(Point::atom("x"))));
}

TEST_CASE("dist_eq is exact") {
    const Dist d = uniform_ab();
    CHECK(dist_eq(d, d));
    const Dist off({a(), b()}, {{a(), Rational(501, 1000)}, {b(), Rational(499, 1000)}});
    CHECK_FALSE(dist_eq(d, off));
    // Same mass map behind a reordered alphabet still compares equal.
    const Dist reordered({b(), a()}, {{a(), Rational(1, 2)}, {b(), Rational(1, 2)}});
    CHECK(dist_eq(d, reordered));
    CHECK_FALSE(d == reordered);
    // Disjoint alphabets are unequal, not an error.
    CHECK_FALSE(dist_eq(d, Dist::point_mass(Point::atom("x"))));
}

TEST_CASE("pushforward preserves total mass on random inputs") {
    gen::Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const Dist d = gen::random_dist(rng, gen::atom_alphabet("p", rng.uniform(2, 6)));
        const std::vector<Point> targets = gen::atom_alphabet("t", rng.uniform(1, 3));
        std::map<Point, Point> table;
        for (const Point& p : d.alphabet()) table.emplace(p, targets[rng.index(targets.size())]);
        const Dist out = pushforward(d, table);
        Rational total = 0;
        for (const auto& [p, m] : out.masses()) total += m;
        CHECK(total == 1);
    }
}

TEST_CASE("both coupling strategies recover every factor on random inputs") {
    gen::Rng rng(102);
    for (int trial = 0; trial < 150; ++trial) {
        std::vector<std::pair<std::string, Dist>> factors;
        const int count = rng.uniform(1, 3);
        for (int i = 0; i < count; ++i) {
            factors.emplace_back(
                "k" + std::to_string(i),
                gen::random_dist(rng, gen::atom_alphabet("p", rng.uniform(2, 4))));
        }
        for (const auto& couple : {CouplingStrategy(product_coupling),
                                   CouplingStrategy(monotone_coupling)}) {
            const JointDist j = couple(factors);
            for (const auto& [key, factor] : factors) {
                CHECK(dist_eq(project(j, key), factor));
            }
        }
    }
}

TEST_CASE("pushforward composes") {
    gen::Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        const Dist d = gen::random_dist(rng, gen::atom_alphabet("p", rng.uniform(2, 5)));
        const std::vector<Point> mids = gen::atom_alphabet("m", rng.uniform(1, 3));
        const std::vector<Point> ends = gen::atom_alphabet("e", rng.uniform(1, 3));
        std::map<Point, Point> f;
        for (const Point& p : d.alphabet()) f.emplace(p, mids[rng.index(mids.size())]);
        std::map<Point, Point> g;
        for (const Point& p : mids) g.emplace(p, ends[rng.index(ends.size())]);
        std::map<Point, Point> gf;
        for (const auto& [p, mid] : f) gf.emplace(p, g.at(mid));
        CHECK(pushforward(d, gf) == pushforward(pushforward(d, f), g));
    }
}

TEST_CASE("dist_eq is an equivalence relation over a common alphabet") {
    gen::Rng rng(104);
    const std::vector<Point> alphabet = gen::atom_alphabet("p", 4);
    for (int trial = 0; trial < 100; ++trial) {
        const Dist x = gen::random_dist(rng, alphabet);
        const Dist y = gen::random_dist(rng, alphabet);
        const Dist x_copy = x;
        CHECK(dist_eq(x, x));
        CHECK(dist_eq(x, y) == dist_eq(y, x));
        CHECK(dist_eq(x, x_copy));
        if (dist_eq(x, y) && dist_eq(y, x_copy)) CHECK(dist_eq(x, x_copy));
    }
}
