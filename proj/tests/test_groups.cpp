#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "mvdyn/error.hpp"
#include "mvdyn/groups.hpp"
#include "oracles.hpp"

using namespace mvdyn;

namespace {

ComplexPoly P(const char* s) { return parse_poly(s); }

QuadDynamics bn() { return {P("-1,-1"), P("1,-2,1")}; }
QuadDynamics obstruction() { return {P("0,1"), P("0,-1,1")}; }
// (1 +- sqrt(z(z-1)))^2: p1 = -(1 + z^2 - z), p0 = (1 + z - z^2)^2
QuadDynamics constant_alpha() { return {P("-1,1,-1"), P("1,2,-1,-2,1")}; }

const char* kCyclic3 = R"(
# Z/3 written as a 2-valued group
carrier: e a b
unit: e
inv: e e, a b, b a
e,e -> [e, e]
e,a -> [a, a]
e,b -> [b, b]
a,e -> [a, a]
a,a -> [b, b]
a,b -> [e, e]
b,e -> [b, b]
b,a -> [e, e]
b,b -> [a, a]
)";

// Z/2 x Z/2; the subgroup generated by a is {e, a}.
const char* kKlein = R"(
carrier: e a b c
unit: e
inv: e e, a a, b b, c c
e,e -> [e, e]
e,a -> [a, a]
e,b -> [b, b]
e,c -> [c, c]
a,e -> [a, a]
a,a -> [e, e]
a,b -> [c, c]
a,c -> [b, b]
b,e -> [b, b]
b,a -> [c, c]
b,b -> [e, e]
b,c -> [a, a]
c,e -> [c, c]
c,a -> [b, b]
c,b -> [a, a]
c,c -> [e, e]
)";

// Multiset of n * m straight from the definition.
std::multiset<int> bn_mult(int n, int m) { return {n + m, std::abs(n - m)}; }

}  // namespace

TEST_CASE("BN product and the triple (1,2,3)") {
    CHECK(BNGroup::product(3, 5) == std::array<int, 2>{8, 2});
    CHECK(BNGroup::product(4, 4) == std::array<int, 2>{8, 0});

    std::multiset<int> left, right;
    for (int w : bn_mult(2, 3))
        for (int v : bn_mult(1, w)) left.insert(v);
    for (int w : bn_mult(1, 2))
        for (int v : bn_mult(w, 3)) right.insert(v);
    CHECK(left == std::multiset<int>{6, 4, 2, 0});
    CHECK(left == right);
}

TEST_CASE("BN group axioms exhaustively to 20") {
    BNGroup g{20};
    auto assoc = check_associativity(g, 20);
    CHECK(assoc.ok());
    CHECK(assoc.checked == 21 * 21 * 21);
    auto ui = check_unit_inverse(g, 20);
    CHECK(ui.ok());
    CHECK(ui.checked == 21);
}

TEST_CASE("table parsing and axioms") {
    auto t = parse_table(kCyclic3);
    REQUIRE(t.size() == 3);
    CHECK(t.unit == t.id("e"));
    CHECK(t.inv[t.id("a")] == t.id("b"));
    CHECK(check_associativity(t).ok());
    CHECK(check_unit_inverse(t).ok());

    auto again = parse_table(to_text(t));
    CHECK(again.carrier == t.carrier);
    CHECK(again.mult == t.mult);
    CHECK(again.inv == t.inv);

    SUBCASE("broken inverse is reported") {
        t.inv[t.id("a")] = t.id("a");
        auto rep = check_unit_inverse(t);
        REQUIRE_FALSE(rep.ok());
        for (auto& v : rep.violations) CHECK(v.law == "inverse");
        CHECK(rep.violations.size() == 2);
    }
    SUBCASE("broken unit is reported") {
        t.mult[{t.id("e"), t.id("a")}] = {t.id("a"), t.id("b")};
        auto rep = check_unit_inverse(t);
        REQUIRE_FALSE(rep.ok());
        CHECK(rep.violations[0].law == "unit");
    }
    SUBCASE("broken associativity is reported") {
        t.mult[{t.id("a"), t.id("a")}] = {t.id("a"), t.id("a")};
        CHECK_FALSE(check_associativity(t).ok());
    }
    SUBCASE("missing product is a violation, not a crash") {
        t.mult.erase({t.id("b"), t.id("b")});
        auto rep = check_associativity(t);
        CHECK_FALSE(rep.ok());
    }
}

TEST_CASE("trivial table (e,e,e)") {
    auto t = parse_table("carrier: e\nunit: e\ninv: e e\ne,e -> [e, e]\n");
    CHECK(check_associativity(t).ok());
    CHECK(check_unit_inverse(t).ok());
    auto c = subgroup_closure(t, 0);
    CHECK(c.elements == std::vector<int>{0});
    CHECK(c.whole_carrier);
}

TEST_CASE("table parse errors") {
    auto code = [](const char* text) {
        try {
            parse_table(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::NonConvergence;
    };
    CHECK(code("unit: e\n") == ErrorCode::ParseError);
    CHECK(code("carrier: e\ninv: e e\n") == ErrorCode::ParseError);
    CHECK(code("carrier: e\nunit: x\ninv: e e\n") == ErrorCode::ParseError);
    CHECK(code("carrier: e\nunit: e\n") == ErrorCode::ParseError);
    CHECK(code("carrier: e\nunit: e\ninv: e e\ne,e -> e\n") == ErrorCode::ParseError);
    CHECK(code("carrier: e\nunit: e\ninv: e e\ncolour: red\n") == ErrorCode::ParseError);
    CHECK(code("carrier: e e\nunit: e\ninv: e e\n") == ErrorCode::ParseError);
}

TEST_CASE("subgroup closure") {
    auto k = parse_table(kKlein);
    CHECK(check_associativity(k).ok());
    auto c = subgroup_closure(k, k.id("a"));
    CHECK(c.elements == std::vector<int>{k.id("e"), k.id("a")});
    CHECK_FALSE(c.whole_carrier);

    auto z3 = parse_table(kCyclic3);
    CHECK(subgroup_closure(z3, z3.id("a")).whole_carrier);
    CHECK(subgroup_closure(z3, z3.id("e")).elements == std::vector<int>{0});

    BNGroup g{12};
    auto one = subgroup_closure(g, 1);
    CHECK(one.whole_carrier);
    CHECK(one.saturated);
    auto zero = subgroup_closure(g, 0);
    CHECK(zero.elements == std::vector<int>{0});
    CHECK_FALSE(zero.saturated);
    auto two = subgroup_closure(g, 2);
    CHECK(two.elements == std::vector<int>{0, 2, 4, 6, 8, 10, 12});
    CHECK_THROWS_AS(subgroup_closure(g, 13), Error);
}

TEST_CASE("bn_action examples") {
    CHECK(matches(bn_action(1, 0), CMultiset{1, 1}, 1e-15).matched);
    CHECK(matches(bn_action(2, 9), CMultiset{25, 1}, 1e-12).matched);
    CHECK(matches(bn_action(1, 9), CMultiset{16, 4}, 1e-12).matched);
    std::mt19937_64 rng(3);
    for (cplx z : oracle::random_points(rng, 20, 50))
        CHECK(matches(bn_action(0, z), CMultiset{z, z}, 1e-12).matched);
}

TEST_CASE("bn_action roots satisfy w^2 - 2(n^2 + z) w + (z - n^2)^2") {
    std::mt19937_64 rng(11);
    for (int n = 0; n <= 6; ++n)
        for (cplx z : oracle::random_points(rng, 15, 40)) {
            auto img = bn_action(n, z);
            double n2 = double(n) * n;
            for (cplx w : img.values()) {
                cplx r = w * w - 2.0 * (n2 + z) * w + (z - n2) * (z - n2);
                CHECK(std::abs(r) < 1e-9 * (1 + std::norm(z) + n2 * n2));
            }
            CHECK(std::abs(img[0] + img[1] - 2.0 * (n2 + z)) < 1e-10 * (1 + std::abs(z) + n2));
        }
}

TEST_CASE("verify_action on the BN action") {
    std::vector<cplx> grid;
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) grid.emplace_back(35.0 * i, 35.0 * j);
    for (cplx z : grid) REQUIRE(std::abs(z) <= 100);

    auto rep = verify_action(ActionSpec::buchstaber_novikov(20), 10, grid, 1e-9);
    CHECK(rep.ok());
    CHECK(rep.checked == 25 * (1 + 11 * 11));
    CHECK(rep.max_distance < 1e-9);

    // The hand-expanded case (1, 1) at 9.
    std::vector<cplx> nine{9};
    auto one = verify_action(ActionSpec::buchstaber_novikov(2), 1, nine, 1e-12);
    CHECK(one.ok());
    auto left = concat(bn_action(1, 16), bn_action(1, 4));
    CHECK(matches(left, CMultiset{25, 9, 9, 1}, 1e-12).matched);
}

TEST_CASE("verify_action flags a wrong multiplication") {
    auto spec = ActionSpec::buchstaber_novikov(5);
    spec.mult = [](int n, int m) { return std::array<int, 2>{n + m, n + m}; };
    std::vector<cplx> pts{cplx(2, 1), cplx(-3, 0.5)};
    auto rep = verify_action(spec, 3, pts, 1e-9);
    CHECK_FALSE(rep.ok());
    CHECK(rep.max_distance > 1);

    auto bad_unit = ActionSpec::buchstaber_novikov(5);
    bad_unit.nu = [](int n, cplx z) { return bn_action(n + 1, z); };
    CHECK_FALSE(verify_action(bad_unit, 0, pts, 1e-9).ok());
}

TEST_CASE("property: nu(n, nu(m, z)) equals the union over n*m") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick(0, 30);
    for (int trial = 0; trial < 300; ++trial) {
        int n = pick(rng), m = pick(rng);
        cplx z = oracle::random_points(rng, 1, 200)[0];
        auto inner = bn_action(m, z);
        std::vector<cplx> left, right;
        for (cplx w : inner.values()) {
            auto outer = bn_action(n, w);
            left.insert(left.end(), outer.values().begin(), outer.values().end());
        }
        for (int k : bn_mult(n, m)) {
            auto direct = bn_action(k, z);
            right.insert(right.end(), direct.values().begin(), direct.values().end());
        }
        double scale = 1 + std::abs(z) + (n + m) * (n + m);
        CHECK(oracle::bottleneck(left, right) < 1e-10 * scale);
    }
}

TEST_CASE("compose of (1 +- sqrt z)^2 is [z, z] with nu(2, z)") {
    auto q = compose(bn());
    std::mt19937_64 rng(23);
    for (cplx z : oracle::random_points(rng, 50, 5)) {
        auto want = concat(CMultiset{z, z}, bn_action(2, z));
        CHECK(bottleneck_match(q.roots_at(z), want).distance <= 1e-7);
    }
}

TEST_CASE("structural match to the BN family") {
    auto m = bn_structural_match(bn());
    REQUIRE(m);
    CHECK(std::abs(m->lambda - cplx(1)) < 1e-15);
    CHECK(std::abs(m->mu) < 1e-15);
    CHECK(m->max_mismatch < 1e-12);

    // (2 +- sqrt z)^2 is nu(1, .) conjugated by z -> z / 4.
    auto m2 = bn_structural_match({P("-4,-1"), P("16,-8,1")});
    REQUIRE(m2);
    CHECK(std::abs(m2->lambda - 0.25) < 1e-15);
    CHECK(m2->max_mismatch < 1e-12);

    // sigma(z) = 2z + 1 + i: T(z) = z + 1/2 +- sqrt(2z + 1 + i).
    auto m3 = bn_structural_match({P("-1/2,-1"), P("-3/4-1i,-1,1")});
    REQUIRE(m3);
    CHECK(std::abs(m3->lambda - cplx(2)) < 1e-14);
    CHECK(std::abs(m3->mu - cplx(1, 1)) < 1e-14);
    CHECK(m3->max_mismatch < 1e-12);

    auto unit = bn_structural_match({P("0,-1"), P("0,0,1")});
    REQUIRE(unit);
    CHECK(unit->lambda == cplx(0));

    CHECK_FALSE(bn_structural_match(obstruction()));
    CHECK_FALSE(bn_structural_match(constant_alpha()));
    CHECK_FALSE(bn_structural_match({P("-1,-1"), P("1,-3,1")}));
}

TEST_CASE("definability report: three reference dynamics") {
    auto known = group_definability_report(bn());
    CHECK(known.verdict == Verdict::KnownGroupDefinable);
    CHECK(known.bn);

    auto obs = group_definability_report(obstruction());
    CHECK(obs.verdict == Verdict::NotGroupDefinable);
    REQUIRE(obs.p0_perfect_square);
    CHECK_FALSE(*obs.p0_perfect_square);
    REQUIRE(obs.obstruction);
    CHECK(std::abs(obs.obstruction->z1 - cplx(1)) < 1e-9);

    auto ca = group_definability_report(constant_alpha());
    CHECK(ca.verdict == Verdict::NotGroupDefinable);
    REQUIRE(ca.p0_perfect_square);
    CHECK(*ca.p0_perfect_square);
    REQUIRE(ca.sufficiency);
    CHECK(ca.sufficiency->certificate);
    CHECK(std::abs(std::abs(ca.sufficiency->c) - 1) < 1e-12);
}

TEST_CASE("definability report: other outcomes") {
    // (sqrt z +- sqrt(z + 1))^2: p0 = 1 is a square, neither part constant.
    auto nc = group_definability_report({P("-1,-2"), P("1")});
    CHECK(nc.verdict == Verdict::NecessaryConditionHolds);
    REQUIRE(nc.form);

    // p1^2 - p0 = z^2 splits into z -> 0 and z -> -2z.
    auto split = group_definability_report({P("0,1"), P("0")});
    CHECK(split.verdict == Verdict::Inconclusive);
    CHECK_FALSE(split.notes.empty());

    // Shift-normalisation: conjugating the obstruction example by z -> z + 3 keeps the verdict.
    auto shifted = conjugate_by_shift(obstruction(), Gauss(3));
    CHECK(group_definability_report(shifted).verdict == Verdict::NotGroupDefinable);
}
