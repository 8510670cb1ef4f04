#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <utility>

#include "hvmforge/canonical.hpp"
#include "hvmforge/transform.hpp"

#include "support/generators.hpp"

using namespace hvmforge;

namespace {

template <typename A, typename B>
void check_realize_equal(const A& a, const B& b) {
    REQUIRE(a.structure().congruent(b.structure()));
    for (const Context& c : a.structure().contexts()) {
        CHECK(dist_eq(realize(a, c.id).dist(), realize(b, c.id).dist()));
    }
}

}  // namespace

TEST_CASE("ci_to_fc couples point masses into a point mass") {
    Structure st({{"q1", {"x", "y"}}}, {{"c1", {"q1"}}, {"c2", {"q1"}}});
    const Point pa = Point::atom("a");
    const Point pb = Point::atom("b");
    std::map<std::string, Dist> hidden;
    hidden.emplace("c1", Dist({pa, pb}, {{pa, Rational(1)}}));
    hidden.emplace("c2", Dist({pa, pb}, {{pb, Rational(1)}}));
    ResponseQ beta{{{"q1", pa}, "x"}, {{"q1", pb}, "y"}};
    const CiHvm m(st, {pa, pb}, std::move(hidden), std::move(beta));

    const FcHvm out = ci_to_fc(m);
    REQUIRE(out.hidden().masses().size() == 1);
    const Point coupled = out.hidden().masses().begin()->first;
    CHECK(coupled.at("c1") == pa);
    CHECK(coupled.at("c2") == pb);
    CHECK(out.response().at(std::tuple(std::string("q1"), std::string("c1"), coupled)) ==
          "x");
    CHECK(out.response().at(std::tuple(std::string("q1"), std::string("c2"), coupled)) ==
          "y");
    check_realize_equal(m, out);
}

TEST_CASE("the PR box survives the fc -> ci -> fc round trip") {
    const FcHvm fc = pr_box_fc_hvm();
    const System pr = pr_box_system();
    const CiHvm ci = fc_to_ci(fc);
    CHECK(models(ci, pr));
    const FcHvm back = ci_to_fc(ci);
    CHECK(models(back, pr));
    check_realize_equal(fc, back);
}

TEST_CASE("fc_to_ci bundles context outcomes into assignments") {
    const CiHvm ci = fc_to_ci(pr_box_fc_hvm());
    // In context c4 the coin lands on one of the two anticorrelated
    // assignments with equal probability.
    const Dist& mu4 = ci.hidden("c4");
    const Point a1 = Point::record({{"q4", Point::atom("-1")}, {"q1", Point::atom("+1")}});
    const Point a2 = Point::record({{"q4", Point::atom("+1")}, {"q1", Point::atom("-1")}});
    CHECK(mu4.mass(a1) == Rational(1, 2));
    CHECK(mu4.mass(a2) == Rational(1, 2));
    CHECK(ci.response().at(std::pair(std::string("q4"), a1)) == "-1");
    CHECK(ci.response().at(std::pair(std::string("q1"), a1)) == "+1");
}

TEST_CASE("fc_to_ci supports are assignments on exactly the context's properties") {
    gen::Rng rng(401);
    for (int trial = 0; trial < 50; ++trial) {
        const FcHvm fc = gen::random_fc(rng);
        const CiHvm ci = fc_to_ci(fc);
        for (const Context& c : ci.structure().contexts()) {
            std::set<std::string> expected(c.properties.begin(), c.properties.end());
            for (const auto& [assignment, mass] : ci.hidden(c.id).masses()) {
                std::set<std::string> keys;
                for (const auto& [k, v] : assignment.fields()) keys.insert(k);
                CHECK(keys == expected);
            }
        }
        check_realize_equal(fc, ci);
    }
}

TEST_CASE("fc_to_ci keeps point masses deterministic") {
    gen::Rng rng(402);
    Structure st = gen::random_structure(rng);
    const Point l0 = Point::atom("l0");
    ResponseQC gamma;
    for (const Context& c : st.contexts()) {
        for (const std::string& q : c.properties) {
            gamma[std::tuple(q, c.id, l0)] = gen::random_outcome(rng, st, q);
        }
    }
    const FcHvm fc(st, Dist::point_mass(l0), std::move(gamma));
    const CiHvm ci = fc_to_ci(fc);
    for (const Context& c : st.contexts()) {
        CHECK(ci.hidden(c.id).masses().size() == 1);
    }
}

TEST_CASE("fc_to_ci of a context-blind response is a per-context push-forward") {
    gen::Rng rng(412);
    Structure st = gen::random_structure(rng);
    std::vector<Point> alphabet = gen::atom_alphabet("l", 3);
    // One outcome map per property, used in every context.
    std::map<std::pair<std::string, Point>, std::string> shared_map;
    ResponseQC gamma;
    for (const Property& p : st.properties()) {
        for (const Point& lambda : alphabet) {
            shared_map[std::pair(p.id, lambda)] = gen::random_outcome(rng, st, p.id);
        }
    }
    for (const Context& c : st.contexts()) {
        for (const std::string& q : c.properties) {
            for (const Point& lambda : alphabet) {
                gamma[std::tuple(q, c.id, lambda)] = shared_map.at(std::pair(q, lambda));
            }
        }
    }
    const FcHvm fc(st, gen::random_dist(rng, alphabet), std::move(gamma));
    const CiHvm ci = fc_to_ci(fc);
    check_realize_equal(fc, ci);
    // Each mu^c equals the push-forward of the one hidden coin through
    // the context's bundling map.
    for (const Context& c : st.contexts()) {
        const Dist expected = pushforward(fc.hidden(), [&](const Point& lambda) {
            std::vector<Point::Field> fields;
            for (const std::string& q : c.properties) {
                fields.emplace_back(q, Point::atom(shared_map.at(std::pair(q, lambda))));
            }
            return Point::record(std::move(fields));
        });
        CHECK(dist_eq(Dist(expected.support(), expected.masses()),
                      Dist(ci.hidden(c.id).support(), ci.hidden(c.id).masses())));
    }
}

TEST_CASE("general_to_fc couples point masses into one point mass") {
    gen::Rng rng(413);
    Structure st = gen::random_structure(rng);
    std::map<std::string, Dist> hidden;
    ResponseQC alpha;
    for (const Context& c : st.contexts()) {
        const Point lambda = Point::atom("only_" + c.id);
        for (const std::string& q : c.properties) {
            alpha[std::tuple(q, c.id, lambda)] = gen::random_outcome(rng, st, q);
        }
        hidden.emplace(c.id, Dist::point_mass(lambda));
    }
    const GeneralHvm m(st, std::move(hidden), std::move(alpha));
    const FcHvm out = general_to_fc(m);
    REQUIRE(out.hidden().masses().size() == 1);
    const Point& tuple = out.hidden().masses().begin()->first;
    for (const Context& c : st.contexts()) {
        CHECK(tuple.at(c.id) == Point::atom("only_" + c.id));
    }
    check_realize_equal(m, out);
}

TEST_CASE("xi and rho with point-mass joints stay deterministic") {
    Structure st({{"q1", {"+1", "-1"}}, {"q2", {"+1", "-1"}}}, {{"c1", {"q1", "q2"}}});
    const Point pa = Point::atom("a");
    const Point px = Point::atom("x");
    std::map<std::string, std::vector<Point>> comps{{"q1", {pa}}, {"q2", {px}}};
    std::map<Point, Rational> mass{
        {Point::record({{"q1", pa}, {"q2", px}}), Rational(1)}};
    ResponseQC xi{{{"q1", "c1", pa}, "+1"}, {{"q2", "c1", px}, "-1"}};
    const XiHvm xm(st, {{"c1", JointDist::sparse({"q1", "q2"}, comps, mass)}},
                   std::move(xi));
    const GeneralHvm g = xi_to_general(xm);
    CHECK(realize(g, "c1").mass(Point::record(
              {{"q1", Point::atom("+1")}, {"q2", Point::atom("-1")}})) == 1);

    ResponseQ rho{{{"q1", pa}, "+1"}, {{"q2", px}, "-1"}};
    const RhoHvm rm(st, JointDist::sparse({"q1", "q2"}, comps, mass), std::move(rho));
    const NcHvm nc = rho_to_nc(rm);
    REQUIRE(nc.hidden().masses().size() == 1);
    CHECK(realize(nc, "c1").mass(Point::record(
              {{"q1", Point::atom("+1")}, {"q2", Point::atom("-1")}})) == 1);
}

TEST_CASE("general_to_fc with one context is a relabeling") {
    Structure st({{"q1", {"x", "y"}}}, {{"c1", {"q1"}}});
    const Point pa = Point::atom("a");
    const Point pb = Point::atom("b");
    std::map<std::string, Dist> hidden;
    hidden.emplace("c1", Dist::uniform({pa, pb}));
    ResponseQC alpha{{{"q1", "c1", pa}, "x"}, {{"q1", "c1", pb}, "y"}};
    const GeneralHvm m(st, std::move(hidden), std::move(alpha));
    const FcHvm out = general_to_fc(m);
    check_realize_equal(m, out);
    CHECK(out.hidden().masses().size() == 2);
}

TEST_CASE("fc_to_general embeds trivially") {
    gen::Rng rng(403);
    for (int trial = 0; trial < 30; ++trial) {
        const FcHvm fc = gen::random_fc(rng);
        const GeneralHvm g = fc_to_general(fc);
        check_realize_equal(fc, g);
        for (const Context& c : fc.structure().contexts()) {
            CHECK(g.hidden(c.id) == fc.hidden());
        }
    }
    CHECK(models(fc_to_general(pr_box_fc_hvm()), pr_box_system()));
}

TEST_CASE("general_to_fc with shared hidden dists but context-bound responses") {
    gen::Rng rng(414);
    for (int trial = 0; trial < 20; ++trial) {
        Structure st = gen::random_structure(rng);
        std::vector<Point> alphabet = gen::atom_alphabet("l", rng.uniform(2, 4));
        const Dist shared = gen::random_dist(rng, alphabet);
        std::map<std::string, Dist> hidden;
        ResponseQC alpha;
        for (const Context& c : st.contexts()) {
            hidden.emplace(c.id, shared);
            for (const std::string& q : c.properties) {
                for (const Point& lambda : alphabet) {
                    alpha[std::tuple(q, c.id, lambda)] = gen::random_outcome(rng, st, q);
                }
            }
        }
        const GeneralHvm m(st, std::move(hidden), std::move(alpha));
        check_realize_equal(m, general_to_fc(m));
    }
}

TEST_CASE("xi_to_general reads components out of the per-context joint") {
    Structure st({{"q1", {"+1", "-1"}}, {"q2", {"+1", "-1"}}}, {{"c1", {"q1", "q2"}}});
    const Point pa = Point::atom("a");
    const Point pb = Point::atom("b");
    const Point px = Point::atom("x");
    const Point py = Point::atom("y");
    std::map<std::string, std::vector<Point>> comps{{"q1", {pa, pb}}, {"q2", {px, py}}};
    std::map<Point, Rational> mass{
        {Point::record({{"q1", pa}, {"q2", px}}), Rational(1, 2)},
        {Point::record({{"q1", pb}, {"q2", py}}), Rational(1, 2)}};
    std::map<std::string, JointDist> hidden;
    hidden.emplace("c1", JointDist::sparse({"q1", "q2"}, comps, mass));
    ResponseQC xi{{{"q1", "c1", pa}, "+1"},
                  {{"q1", "c1", pb}, "-1"},
                  {{"q2", "c1", px}, "+1"},
                  {{"q2", "c1", py}, "-1"}};
    const XiHvm m(st, std::move(hidden), std::move(xi));
    const GeneralHvm out = xi_to_general(m);
    check_realize_equal(m, out);
    const JointDist j = realize(out, "c1");
    CHECK(j.mass(Point::record({{"q1", Point::atom("+1")}, {"q2", Point::atom("+1")}})) ==
          Rational(1, 2));
    CHECK(j.mass(Point::record({{"q1", Point::atom("-1")}, {"q2", Point::atom("-1")}})) ==
          Rational(1, 2));
}

TEST_CASE("xi realizations match a direct push-forward of the joint") {
    gen::Rng rng(404);
    for (int trial = 0; trial < 30; ++trial) {
        const XiHvm m = gen::random_xi(rng);
        for (const Context& c : m.structure().contexts()) {
            // Oracle: push the joint through xi componentwise by hand.
            std::map<Point, Rational> expected;
            for (const auto& [lambda, w] : m.hidden(c.id).dist().masses()) {
                std::vector<Point::Field> fields;
                for (const std::string& q : c.properties) {
                    fields.emplace_back(
                        q, Point::atom(m.response().at(std::tuple(q, c.id, lambda.at(q)))));
                }
                expected[Point::record(std::move(fields))] += w;
            }
            const JointDist j = realize(m, c.id);
            for (const auto& [tuple, w] : expected) CHECK(j.mass(tuple) == w);
            Rational covered = 0;
            for (const auto& [tuple, w] : expected) covered += w;
            CHECK(covered == 1);
        }
    }
}

TEST_CASE("rho_to_nc couples per-property variables into assignments") {
    Structure st({{"q1", {"+1", "-1"}}, {"q2", {"+1", "-1"}}}, {{"c1", {"q1", "q2"}}});
    const Point pa = Point::atom("a");
    const Point pb = Point::atom("b");
    const Point px = Point::atom("x");
    const Point py = Point::atom("y");
    std::map<std::string, std::vector<Point>> comps{{"q1", {pa, pb}}, {"q2", {px, py}}};
    std::map<Point, Rational> mass{
        {Point::record({{"q1", pa}, {"q2", px}}), Rational(1, 2)},
        {Point::record({{"q1", pb}, {"q2", py}}), Rational(1, 2)}};
    ResponseQ rho{{{"q1", pa}, "+1"},
                  {{"q1", pb}, "-1"},
                  {{"q2", px}, "+1"},
                  {{"q2", py}, "-1"}};
    const RhoHvm m(st, JointDist::sparse({"q1", "q2"}, comps, mass), std::move(rho));
    const NcHvm out = rho_to_nc(m);
    check_realize_equal(m, out);
    CHECK(realize(out, "c1").mass(Point::record(
              {{"q1", Point::atom("+1")}, {"q2", Point::atom("+1")}})) == Rational(1, 2));
}

TEST_CASE("rho_to_nc output realizes a consistently connected system") {
    gen::Rng rng(405);
    for (int trial = 0; trial < 30; ++trial) {
        const RhoHvm m = gen::random_rho(rng);
        const NcHvm nc = rho_to_nc(m);
        check_realize_equal(m, nc);
        CHECK(is_consistently_connected(realized_system(nc)).consistent);
    }
}

TEST_CASE("embeddings of the nc form leave realizations unchanged") {
    gen::Rng rng(406);
    for (int trial = 0; trial < 30; ++trial) {
        const NcHvm nc = gen::random_nc(rng);
        check_realize_equal(nc, nc_to_fc(nc));
        check_realize_equal(nc, nc_to_ci(nc));
        check_realize_equal(nc, nc_to_general(nc));
        const Hvm embedded = embed_nc(nc, HvmForm::fc);
        CHECK(form_of(embedded) == HvmForm::fc);
    }
    CHECK_THROWS_AS(embed_nc(gen::random_nc(rng), HvmForm::rho), ValidationError);
}

TEST_CASE("theorem check: every licensed transformation preserves realizations") {
    gen::Rng rng(407);
    for (int trial = 0; trial < 60; ++trial) {
        const CiHvm ci = gen::random_ci(rng);
        check_realize_equal(ci, ci_to_fc(ci));
        const FcHvm fc = gen::random_fc(rng);
        check_realize_equal(fc, fc_to_ci(fc));
        check_realize_equal(fc, fc_to_general(fc));
        const GeneralHvm g = gen::random_general(rng);
        check_realize_equal(g, general_to_fc(g));
        const XiHvm xi = gen::random_xi(rng);
        check_realize_equal(xi, xi_to_general(xi));
        const RhoHvm rho = gen::random_rho(rng);
        check_realize_equal(rho, rho_to_nc(rho));
    }
}

TEST_CASE("round trip: ci_to_fc then fc_to_ci realizes the same system") {
    gen::Rng rng(408);
    for (int trial = 0; trial < 40; ++trial) {
        const CiHvm ci = gen::random_ci(rng);
        check_realize_equal(ci, fc_to_ci(ci_to_fc(ci)));
    }
}

TEST_CASE("coupling strategies do not change what ci_to_fc realizes") {
    gen::Rng rng(409);
    for (int trial = 0; trial < 50; ++trial) {
        const CiHvm ci = gen::random_ci(rng);
        const FcHvm via_product = ci_to_fc(ci, product_coupling);
        const FcHvm via_monotone = ci_to_fc(ci, monotone_coupling);
        check_realize_equal(via_product, via_monotone);
        check_realize_equal(ci, via_monotone);
    }
}

TEST_CASE("identical per-context distributions stay unchanged under coupling") {
    gen::Rng rng(410);
    for (int trial = 0; trial < 20; ++trial) {
        Structure st = gen::random_structure(rng);
        std::vector<Point> alphabet = gen::atom_alphabet("l", rng.uniform(2, 4));
        const Dist shared = gen::random_dist(rng, alphabet);
        std::map<std::string, Dist> hidden;
        for (const Context& c : st.contexts()) hidden.emplace(c.id, shared);
        ResponseQ beta;
        for (const Property& p : st.properties()) {
            for (const Point& lambda : alphabet) {
                beta[std::pair(p.id, lambda)] = gen::random_outcome(rng, st, p.id);
            }
        }
        const CiHvm ci(st, alphabet, std::move(hidden), std::move(beta));
        check_realize_equal(ci, ci_to_fc(ci, product_coupling));
    }
}

TEST_CASE("a broken coupling strategy is rejected") {
    Structure st({{"q1", {"x", "y"}}}, {{"c1", {"q1"}}, {"c2", {"q1"}}});
    const Point pa = Point::atom("a");
    const Point pb = Point::atom("b");
    std::map<std::string, Dist> hidden;
    hidden.emplace("c1", Dist::uniform({pa, pb}));
    hidden.emplace("c2", Dist::uniform({pa, pb}));
    ResponseQ beta{{{"q1", pa}, "x"}, {{"q1", pb}, "y"}};
    const CiHvm ci(st, {pa, pb}, std::move(hidden), std::move(beta));

    // Dumps all mass on the first support points: not a coupling of two
    // uniform factors.
    const CouplingStrategy broken =
        [](const std::vector<std::pair<std::string, Dist>>& factors) {
            std::vector<std::string> keys;
            std::map<std::string, std::vector<Point>> comps;
            std::vector<Point::Field> fields;
            for (const auto& [k, d] : factors) {
                keys.push_back(k);
                comps.emplace(k, d.alphabet());
                fields.emplace_back(k, d.masses().begin()->first);
            }
            std::map<Point, Rational> mass{{Point::record(fields), Rational(1)}};
            return JointDist::sparse(keys, comps, mass);
        };
    CHECK_THROWS_AS(ci_to_fc(ci, broken), ValidationError);
}
