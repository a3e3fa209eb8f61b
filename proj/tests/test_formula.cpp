#include "ideriv/formula.hpp"
#include "ideriv/formula_io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <utility>
#include <vector>

using namespace ideriv;

namespace {

RawSymbol raw(int dims, std::initializer_list<int> H, int t) {
    return RawSymbol{Multiset(dims, H), t};
}

DeltaSymbol del(int dims, std::initializer_list<int> J, int r) {
    return DeltaSymbol{Multiset(dims, J), r};
}

// Looks up the coefficient of the term with the given factors, normalizing
// the factor list the same way Formula::add does.
template <class Sym>
Rat coeff_of(const Formula<Sym>& f, std::vector<std::pair<Sym, int>> factors, int fy_power) {
    Formula<Sym> probe;
    probe.add(Monomial<Sym>{std::move(factors), fy_power}, 1);
    REQUIRE(probe.size() == 1);
    auto it = f.terms().find(probe.terms().begin()->first);
    return it == f.terms().end() ? Rat(0) : it->second;
}

}  // namespace

TEST_CASE("formula terms normalize on insertion") {
    RawFormula f;
    // unsorted, split factor list collapses to one canonical monomial
    f.add({{{raw(2, {1}, 1), 1}, {raw(2, {2}, 0), 1}}, 2}, 1);
    f.add({{{raw(2, {2}, 0), 1}, {raw(2, {1}, 1), 1}}, 2}, 2);
    REQUIRE(f.size() == 1);
    CHECK(f.terms().begin()->second == 3);
    CHECK(f.terms().begin()->first.factors.front().first == raw(2, {2}, 0));

    // exact cancellation removes the term
    f.add({{{raw(2, {1}, 1), 1}, {raw(2, {2}, 0), 1}}, 2}, -3);
    CHECK(f.is_zero());

    // zero coefficients and zero exponents are dropped; negatives are rejected
    f.add({{{raw(2, {1}, 0), 0}}, 1}, 5);
    REQUIRE(f.size() == 1);
    CHECK(f.terms().begin()->first.factors.empty());
    CHECK_THROWS_AS(f.add({{{raw(2, {1}, 0), -1}}, 0}, 1), std::invalid_argument);

    RawFormula g = RawFormula::constant(Rat(1, 2), 1);
    RawFormula prod = f * g;  // 5/f_y * 1/(2 f_y)
    REQUIRE(prod.size() == 1);
    CHECK(prod.terms().begin()->first.fy_power == 2);
    CHECK(prod.terms().begin()->second == Rat(5, 2));
    CHECK((f - f).is_zero());
    CHECK(Rat(3) * g == g + g + g);
}

TEST_CASE("first and second order formulas match the classical ones") {
    // y_i = -f_i/f_y
    RawFormula y1 = raw_formula(Multiset(2, {1}));
    REQUIRE(y1.size() == 1);
    CHECK(coeff_of(y1, {{raw(2, {1}, 0), 1}}, 1) == -1);
    CHECK_THROWS_AS(raw_formula(Multiset(2)), std::invalid_argument);

    // y_ij: four terms over f_y, f_y^2, f_y^2, f_y^3
    RawFormula y12 = raw_formula(Multiset(2, {1, 2}));
    REQUIRE(y12.size() == 4);
    CHECK(coeff_of(y12, {{raw(2, {1, 2}, 0), 1}}, 1) == -1);
    CHECK(coeff_of(y12, {{raw(2, {1}, 1), 1}, {raw(2, {2}, 0), 1}}, 2) == 1);
    CHECK(coeff_of(y12, {{raw(2, {2}, 1), 1}, {raw(2, {1}, 0), 1}}, 2) == 1);
    CHECK(coeff_of(y12, {{raw(2, {}, 2), 1}, {raw(2, {1}, 0), 1}, {raw(2, {2}, 0), 1}}, 3) == -1);

    // repeated index merges the two middle terms into a factor 2
    RawFormula y11 = raw_formula(Multiset(1, {1, 1}));
    REQUIRE(y11.size() == 3);
    CHECK(coeff_of(y11, {{raw(1, {1, 1}, 0), 1}}, 1) == -1);
    CHECK(coeff_of(y11, {{raw(1, {1}, 1), 1}, {raw(1, {1}, 0), 1}}, 2) == 2);
    CHECK(coeff_of(y11, {{raw(1, {}, 2), 1}, {raw(1, {1}, 0), 2}}, 3) == -1);

    // the difference form of y_ij is a single symbol
    DeltaFormula d12 = delta_formula(Multiset(2, {1, 2}));
    REQUIRE(d12.size() == 1);
    CHECK(coeff_of(d12, {{del(2, {1, 2}, 0), 1}}, 3) == -1);
    CHECK_THROWS_AS(delta_formula(Multiset(2, {1})), std::invalid_argument);
}

TEST_CASE("third order difference form lists one top symbol and three splits") {
    DeltaFormula d = delta_formula(Multiset(3, {1, 2, 3}));
    REQUIRE(d.size() == 4);
    CHECK(coeff_of(d, {{del(3, {1, 2, 3}, 0), 1}}, 4) == -1);
    CHECK(coeff_of(d, {{del(3, {1}, 1), 1}, {del(3, {2, 3}, 0), 1}}, 5) == 1);
    CHECK(coeff_of(d, {{del(3, {2}, 1), 1}, {del(3, {1, 3}, 0), 1}}, 5) == 1);
    CHECK(coeff_of(d, {{del(3, {3}, 1), 1}, {del(3, {1, 2}, 0), 1}}, 5) == 1);

    // repeated indices scale the splits by the number of mergers; only two
    // splits exist since the second part needs at least two indices
    DeltaFormula dr = delta_formula(Multiset(2, {1, 1, 2}));
    REQUIRE(dr.size() == 3);
    CHECK(coeff_of(dr, {{del(2, {1, 1, 2}, 0), 1}}, 4) == -1);
    CHECK(coeff_of(dr, {{del(2, {1}, 1), 1}, {del(2, {1, 2}, 0), 1}}, 5) == 2);
    CHECK(coeff_of(dr, {{del(2, {2}, 1), 1}, {del(2, {1, 1}, 0), 1}}, 5) == 1);
    CHECK(coeff_of(dr, {{del(2, {1, 1}, 1), 1}, {del(2, {2}, 0), 1}}, 5) == 0);
}

TEST_CASE("fourth order difference form splits into orbits 1, 4, 6, 3, 6") {
    DeltaFormula d = delta_formula(Multiset(4, {1, 2, 3, 4}));
    REQUIRE(d.size() == 20);

    // orbit key: (part count, multiset of (|J|, r) shapes); every term of an
    // orbit must carry the same coefficient and denominator exponent
    using Shape = std::multiset<std::pair<int, int>>;
    std::map<std::pair<int, Shape>, int> orbit_size;
    std::map<std::pair<int, Shape>, std::set<Rat>> orbit_coeffs;
    std::map<std::pair<int, Shape>, std::set<int>> orbit_fy;
    for (const auto& [mono, coeff] : d.terms()) {
        int h = 0;
        Shape shape;
        for (const auto& [sym, exp] : mono.factors) {
            h += exp;
            for (int k = 0; k < exp; ++k) shape.insert({sym.J.size(), sym.r});
        }
        orbit_size[{h, shape}] += 1;
        orbit_coeffs[{h, shape}].insert(coeff);
        orbit_fy[{h, shape}].insert(mono.fy_power);
    }
    REQUIRE(orbit_size.size() == 5);

    auto check_orbit = [&](int h, Shape shape, int size, Rat coeff, int fy) {
        auto key = std::make_pair(h, std::move(shape));
        CHECK(orbit_size.at(key) == size);
        CHECK(orbit_coeffs.at(key) == std::set<Rat>{coeff});
        CHECK(orbit_fy.at(key) == std::set<int>{fy});
    };
    check_orbit(1, {{4, 0}}, 1, -1, 5);
    check_orbit(2, {{1, 1}, {3, 0}}, 4, 1, 6);
    check_orbit(2, {{2, 1}, {2, 0}}, 6, 1, 6);
    check_orbit(3, {{0, 2}, {2, 0}, {2, 0}}, 3, -1, 7);
    check_orbit(3, {{1, 1}, {1, 1}, {2, 0}}, 6, -2, 7);
}

TEST_CASE("delta expansion reproduces the worked examples") {
    // no indices: the operator is the identity
    RawFormula id2 = expand_delta(del(2, {}, 2));
    REQUIRE(id2.size() == 1);
    CHECK(coeff_of(id2, {{raw(2, {}, 2), 1}}, 0) == 1);
    RawFormula id1 = expand_delta(del(2, {}, 1));  // f_y itself, kept in the exponent
    REQUIRE(id1.size() == 1);
    CHECK(coeff_of(id1, {}, -1) == 1);

    // one index on f_y
    RawFormula dy = expand_delta(del(2, {1}, 1));
    REQUIRE(dy.size() == 2);
    CHECK(coeff_of(dy, {{raw(2, {1}, 1), 1}}, -1) == 1);
    CHECK(coeff_of(dy, {{raw(2, {}, 2), 1}, {raw(2, {1}, 0), 1}}, 0) == -1);

    // one index on f: the two terms cancel identically
    CHECK(expand_delta(del(2, {1}, 0)).is_zero());
    CHECK(expand_delta(del(3, {2}, 0)).is_zero());

    // two distinct indices on f
    RawFormula dij = expand_delta(del(2, {1, 2}, 0));
    REQUIRE(dij.size() == 4);
    CHECK(coeff_of(dij, {{raw(2, {1, 2}, 0), 1}}, -2) == 1);
    CHECK(coeff_of(dij, {{raw(2, {1}, 1), 1}, {raw(2, {2}, 0), 1}}, -1) == -1);
    CHECK(coeff_of(dij, {{raw(2, {2}, 1), 1}, {raw(2, {1}, 0), 1}}, -1) == -1);
    CHECK(coeff_of(dij, {{raw(2, {}, 2), 1}, {raw(2, {1}, 0), 1}, {raw(2, {2}, 0), 1}}, 0) == 1);

    // repeated index picks up the binomial weight
    RawFormula dii = expand_delta(del(1, {1, 1}, 0));
    REQUIRE(dii.size() == 3);
    CHECK(coeff_of(dii, {{raw(1, {1, 1}, 0), 1}}, -2) == 1);
    CHECK(coeff_of(dii, {{raw(1, {1}, 1), 1}, {raw(1, {1}, 0), 1}}, -1) == -2);
    CHECK(coeff_of(dii, {{raw(1, {}, 2), 1}, {raw(1, {1}, 0), 2}}, 0) == 1);

    // the expansion also applies over a general base derivative
    RawFormula dgen = expand_delta(Multiset(2, {1}), raw(2, {2}, 1));
    REQUIRE(dgen.size() == 2);
    CHECK(coeff_of(dgen, {{raw(2, {1, 2}, 1), 1}}, -1) == 1);
    CHECK(coeff_of(dgen, {{raw(2, {2}, 2), 1}, {raw(2, {1}, 0), 1}}, 0) == -1);
    CHECK_THROWS_AS(expand_delta(Multiset(2, {1}), raw(3, {2}, 1)), std::invalid_argument);
}

TEST_CASE("expanding the difference form reproduces the raw form") {
    CHECK(expand_and_compare(Multiset(2, {1, 2})));
    CHECK(expand_and_compare(Multiset(1, {1, 1})));
    CHECK(expand_and_compare(Multiset(3, {1, 2, 3})));
    CHECK(expand_and_compare(Multiset(2, {1, 1, 2})));
    CHECK(expand_and_compare(Multiset(1, {1, 1, 1})));
    CHECK(expand_and_compare(Multiset(4, {1, 2, 3, 4})));
    CHECK(expand_and_compare(Multiset(2, {1, 1, 2, 2})));
    CHECK(expand_and_compare(Multiset(1, {1, 1, 1, 1})));
    CHECK(expand_and_compare(Multiset(2, {1, 1, 1, 2, 2})));
    CHECK_THROWS_AS(expand_and_compare(Multiset(2, {1})), std::invalid_argument);
}

TEST_CASE("vanishing-gradient form equals the filtered raw form") {
    RawFormula z12 = fi_zero_formula(Multiset(2, {1, 2}));
    REQUIRE(z12.size() == 1);
    CHECK(coeff_of(z12, {{raw(2, {1, 2}, 0), 1}}, 1) == -1);

    // size 3, distinct: the four summands of the difference form survive with
    // each difference symbol collapsed to the bare derivative
    RawFormula z123 = fi_zero_formula(Multiset(3, {1, 2, 3}));
    REQUIRE(z123.size() == 4);
    CHECK(coeff_of(z123, {{raw(3, {1, 2, 3}, 0), 1}}, 1) == -1);
    CHECK(coeff_of(z123, {{raw(3, {1}, 1), 1}, {raw(3, {2, 3}, 0), 1}}, 2) == 1);
    CHECK(coeff_of(z123, {{raw(3, {2}, 1), 1}, {raw(3, {1, 3}, 0), 1}}, 2) == 1);
    CHECK(coeff_of(z123, {{raw(3, {3}, 1), 1}, {raw(3, {1, 2}, 0), 1}}, 2) == 1);

    for (int dims = 1; dims <= 3; ++dims)
        for (int size = 2; size <= 5; ++size)
            for (const auto& I : multisets_of_size(dims, size))
                CHECK(fi_zero_formula(I) == drop_singleton_monomials(raw_formula(I)));
    CHECK_THROWS_AS(fi_zero_formula(Multiset(2, {1})), std::invalid_argument);
}

TEST_CASE("trace collections count the multinomial coefficient") {
    // no singleton factors: only the empty trace remains
    Gamma flat(2, {{PartVec{Multiset(2, {1, 2}), 0}, 1}, {PartVec{Multiset(2), 3}, 1}});
    CHECK(zgamma_enumerate(flat).size() == 1);
    CHECK(zgamma_sum(flat) == 1);
    CHECK(zgamma_multinomial(flat) == 1);

    // the unique weight-3 collection for I = {1,2}: one y-squared part and
    // both singletons, traced in a single way with weight binom(2;1,1) = 2
    auto b3 = enumerate_B_g(Multiset(2, {1, 2}), 3);
    REQUIRE(b3.size() == 1);
    auto traces = zgamma_enumerate(b3.front());
    REQUIRE(traces.size() == 1);
    REQUIRE(traces.front().q.size() == 1);
    {
        const auto& [part, K, q] = traces.front().q.front();
        CHECK(part == (PartVec{Multiset(2), 2}));
        CHECK(K == Multiset(2, {1, 2}));
        CHECK(q == 1);
    }
    CHECK(zgamma_sum(b3.front()) == 2);
    CHECK(zgamma_multinomial(b3.front()) == 2);

    // doubled multiplicities: two distinct traces, total 4 + 2 = 6
    Gamma dbl(1, {{PartVec{Multiset(1), 2}, 2}, {PartVec{Multiset(1, {1}), 0}, 2}});
    CHECK(zgamma_enumerate(dbl).size() == 2);
    CHECK(zgamma_sum(dbl) == 6);
    CHECK(zgamma_multinomial(dbl) == 6);

    // a lone singleton part has no pure-y slot to trace it to
    Gamma lone(2, {{PartVec{Multiset(2, {1}), 0}, 1}});
    CHECK_THROWS_AS(zgamma_enumerate(lone), std::invalid_argument);
    CHECK_THROWS_AS(zgamma_sum(lone), std::invalid_argument);
    CHECK_THROWS_AS(zgamma_multinomial(lone), std::invalid_argument);

    // across every collection arising from derivative orders up to 4, the
    // identity holds whenever the hypothesis does, and the hypothesis only
    // fails for the first-order singleton
    std::vector<Multiset> orders;
    for (int size = 1; size <= 4; ++size) {
        for (const auto& I : multisets_of_size(2, size)) orders.push_back(I);
        if (size <= 3) for (const auto& I : multisets_of_size(3, size)) orders.push_back(I);
    }
    for (const auto& I : orders) {
        int violations = 0;
        for (const auto& gm : enumerate_B(I)) {
            Int lhs = 0, rhs = 0;
            bool hypothesis_holds = true;
            try {
                lhs = zgamma_sum(gm);
                rhs = zgamma_multinomial(gm);
            } catch (const std::invalid_argument&) {
                hypothesis_holds = false;
                ++violations;
            }
            if (hypothesis_holds) CHECK(lhs == rhs);
        }
        CHECK(violations == (I.size() == 1 ? 1 : 0));
    }
}

TEST_CASE("degree bookkeeping holds in every emitted term") {
    for (int dims = 1; dims <= 3; ++dims) {
        for (int size = 1; size <= 4; ++size) {
            for (const auto& I : multisets_of_size(dims, size)) {
                RawFormula rf = raw_formula(I);
                for (const auto& [mono, coeff] : rf.terms()) {
                    Multiset isum(dims);
                    int ydiff = 0;
                    for (const auto& [sym, exp] : mono.factors) {
                        CHECK(!(sym.H.empty() && sym.t == 0));
                        CHECK(!(sym.H.empty() && sym.t == 1));
                        for (int k = 0; k < exp; ++k) isum = isum + sym.H;
                        ydiff += sym.t * exp;
                    }
                    CHECK(isum == I);
                    // one fewer y-derivative upstairs than downstairs
                    CHECK(ydiff == mono.fy_power - 1);
                }
                if (size < 2) continue;
                DeltaFormula df = delta_formula(I);
                for (const auto& [mono, coeff] : df.terms()) {
                    Multiset isum(dims);
                    int h = 0, rsum = 0;
                    for (const auto& [sym, exp] : mono.factors) {
                        for (int k = 0; k < exp; ++k) isum = isum + sym.J;
                        h += exp;
                        rsum += sym.r * exp;
                    }
                    CHECK(isum == I);
                    CHECK(rsum == h - 1);
                    CHECK(mono.fy_power == size + h);
                }
            }
        }
    }
}

TEST_CASE("formulas transform covariantly under index permutations") {
    std::vector<int> swap12{2, 1};
    Multiset sym(2, {1, 1, 2, 2});
    CHECK(permuted(raw_formula(sym), swap12) == raw_formula(sym));
    CHECK(permuted(delta_formula(sym), swap12) == delta_formula(sym));

    std::vector<int> cyc{2, 3, 1};
    Multiset all3(3, {1, 2, 3});
    CHECK(permuted(raw_formula(all3), cyc) == raw_formula(all3));
    CHECK(permuted(delta_formula(all3), cyc) == delta_formula(all3));

    // non-stabilizing permutations map the formula of I to the formula of sigma(I)
    CHECK(permuted(raw_formula(Multiset(2, {1, 1})), swap12) == raw_formula(Multiset(2, {2, 2})));
    CHECK(permuted(delta_formula(Multiset(2, {1, 1, 2})), swap12) ==
          delta_formula(Multiset(2, {1, 2, 2})));
}

TEST_CASE("one-variable formulas carry the classical merged coefficients") {
    Multiset third(1, {1, 1, 1});
    CHECK(coeff_of(raw_formula(third), {{raw(1, {1}, 1), 1}, {raw(1, {1, 1}, 0), 1}}, 2) == 3);
    CHECK(coeff_of(delta_formula(third), {{del(1, {1}, 1), 1}, {del(1, {1, 1}, 0), 1}}, 5) == 3);
}

TEST_CASE("plain and latex rendering are deterministic") {
    CHECK(render(RawFormula{}, RenderStyle::plain) == "0");
    CHECK(render(DeltaFormula{}, RenderStyle::latex) == "0");

    CHECK(render(delta_formula(Multiset(2, {1, 2})), RenderStyle::plain) ==
          "-(Δ_{12}f)/f_y^3");
    CHECK(render(delta_formula(Multiset(2, {1, 2})), RenderStyle::latex) ==
          "-\\frac{\\Delta_{12}f}{f_{y}^{3}}");

    CHECK(render(raw_formula(Multiset(2, {1})), RenderStyle::plain) == "-f_1/f_y");
    CHECK(render(raw_formula(Multiset(2, {1, 2})), RenderStyle::plain) ==
          "-f_{12}/f_y + f_{1y}f_2/f_y^2 + f_{2y}f_1/f_y^2 - f_{yy}f_1f_2/f_y^3");
    CHECK(render(raw_formula(Multiset(1, {1, 1})), RenderStyle::plain) ==
          "-f_{11}/f_y + 2f_{1y}f_1/f_y^2 - f_{yy}f_1^2/f_y^3");

    // double-digit dimensions separate subscript indices with commas
    CHECK(render(delta_formula(Multiset(10, {1, 10})), RenderStyle::plain) ==
          "-(Δ_{1,10}f)/f_y^3");

    // fractional coefficients are parenthesized; numerator-side f_y powers
    // print inline
    RawFormula frac = RawFormula::constant(Rat(1, 2), 1);
    CHECK(render(frac, RenderStyle::plain) == "(1/2)/f_y");
    RawFormula neg;
    neg.add({{{raw(2, {1}, 0), 1}}, -2}, -1);
    CHECK(render(neg, RenderStyle::plain) == "-f_1f_y^2");
    CHECK(render(RawFormula::constant(Rat(-3)), RenderStyle::plain) == "-3");

    // higher pure-y derivatives read y^t in both styles
    RawFormula pure;
    pure.add({{{raw(1, {}, 3), 2}}, 0}, 1);
    CHECK(render(pure, RenderStyle::plain) == "f_{y^3}^2");
    CHECK(render(pure, RenderStyle::latex) == "f_{y^{3}}^{2}");
}

TEST_CASE("renderings match the golden snapshots") {
    auto golden = [](const char* name) {
        std::ifstream in(std::string(IDERIV_GOLDEN_DIR) + "/" + name);
        REQUIRE(in.good());
        std::string line;
        std::getline(in, line);
        return line;
    };
    CHECK(render(raw_formula(Multiset(2, {1, 2})), RenderStyle::plain) ==
          golden("raw_order2_plain.txt"));
    CHECK(render(raw_formula(Multiset(2, {1, 2})), RenderStyle::latex) ==
          golden("raw_order2_latex.txt"));
    CHECK(render(delta_formula(Multiset(3, {1, 2, 3})), RenderStyle::plain) ==
          golden("delta_order3_plain.txt"));
    CHECK(render(delta_formula(Multiset(4, {1, 2, 3, 4})), RenderStyle::plain) ==
          golden("delta_order4_plain.txt"));
}

TEST_CASE("structured serialization round-trips") {
    for (const auto& I : {Multiset(2, {1, 2}), Multiset(2, {1, 1, 2}), Multiset(3, {1, 2, 3})}) {
        RawFormula rf = raw_formula(I);
        nlohmann::json jr = structured_json(rf);
        CHECK(raw_formula_from_json(jr, I.dims()) == rf);
        CHECK(raw_formula_from_json(nlohmann::json::parse(jr.dump()), I.dims()) == rf);

        DeltaFormula df = delta_formula(I);
        nlohmann::json jd = structured_json(df);
        CHECK(delta_formula_from_json(jd, I.dims()) == df);
        CHECK(render(delta_formula_from_json(jd, I.dims()), RenderStyle::plain) ==
              render(df, RenderStyle::plain));
    }

    // spot-check the schema of one serialized term
    nlohmann::json j = structured_json(raw_formula(Multiset(2, {1})));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    CHECK(j[0]["coefficient"] == "-1");
    CHECK(j[0]["fy_power"] == 1);
    REQUIRE(j[0]["factors"].size() == 1);
    CHECK(j[0]["factors"][0]["H"] == "1");
    CHECK(j[0]["factors"][0]["t"] == 0);
    CHECK(j[0]["factors"][0]["exp"] == 1);

    // malformed inputs are rejected with a parse error
    using nlohmann::json;
    CHECK_THROWS_AS(raw_formula_from_json(json::parse(R"({"a":1})"), 2), std::invalid_argument);
    CHECK_THROWS_AS(raw_formula_from_json(json::parse(R"([{"coefficient":"0","fy_power":1,"factors":[]}])"), 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(raw_formula_from_json(json::parse(R"([{"coefficient":"1","fy_power":1}])"), 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        raw_formula_from_json(
            json::parse(R"([{"coefficient":"1","fy_power":1,"factors":[{"H":"1","t":0,"exp":0}]}])"), 2),
        std::invalid_argument);
    CHECK_THROWS_AS(
        raw_formula_from_json(
            json::parse(R"([{"coefficient":"1","fy_power":1,"factors":[{"J":"1","r":0,"exp":1}]}])"), 2),
        std::invalid_argument);
    CHECK_THROWS_AS(
        raw_formula_from_json(
            json::parse(R"([{"coefficient":"x","fy_power":1,"factors":[]}])"), 2),
        std::invalid_argument);
}
