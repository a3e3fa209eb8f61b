#include "ideriv/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace ideriv;

namespace {

RatFunc var(int dims, std::initializer_list<int> H, int t) {
    return RatFunc::variable({Multiset(dims, H), t});
}

RatFunc delta_rf(const Multiset& J, const RawSymbol& g) {
    return ratfunc_of(expand_delta(J, g), J.dims());
}

}  // namespace

TEST_CASE("polynomial arithmetic and normalization") {
    const int d = 2;
    Poly x = Poly::variable({Multiset(d, {1}), 0});
    Poly y = Poly::variable({Multiset(d, {2}), 0});

    Poly p = x * y + Rat(2) * x;
    CHECK(p.terms().size() == 2);
    CHECK((p - p).is_zero());
    CHECK(p * Poly(Rat(0)) == Poly());
    CHECK((x + y) * (x - y) == x * x - y * y);

    CHECK(Poly(Rat(6, 4)).content() == Rat(3, 2));
    CHECK((Rat(2) * x + Rat(4) * y).content() == 2);
    CHECK((Rat(1, 2) * x + Rat(1, 3) * y).content() == Rat(1, 6));
    CHECK(Poly().content() == 0);

    // x*y + 2x has common factor x
    auto common = (x * y + Rat(2) * x).common_monomial();
    REQUIRE(common.size() == 1);
    CHECK(common.begin()->first == (RawSymbol{Multiset(d, {1}), 0}));
    CHECK(common.begin()->second == 1);
    CHECK((x + y).common_monomial().empty());

    CHECK_THROWS_AS(Poly::variable({Multiset(d, {1}), 0}, -1), std::invalid_argument);
    CHECK_THROWS_AS((x + Poly(Rat(1))).constant_value(), std::logic_error);
}

TEST_CASE("rational functions normalize and compare exactly") {
    const int d = 2;
    RatFunc x = var(d, {1}, 0);
    RatFunc y = var(d, {2}, 0);
    RatFunc fy = var(d, {}, 1);

    CHECK_THROWS_AS(RatFunc(Poly(Rat(1)), Poly()), std::invalid_argument);
    CHECK_THROWS_AS(x / RatFunc(), std::invalid_argument);

    // common monomial factors cancel on construction
    RatFunc r(Poly::variable({Multiset(d, {}), 1}) * Poly::variable({Multiset(d, {1}), 0}),
              Poly::variable({Multiset(d, {}), 1}, 3));
    CHECK(r.den() == Poly::variable({Multiset(d, {}), 1}, 2));
    CHECK(r.num() == Poly::variable({Multiset(d, {1}), 0}));

    // scalar content moves to the numerator, denominator leads positive
    RatFunc s(Poly(Rat(3)), Rat(-2) * Poly::variable({Multiset(d, {}), 1}));
    CHECK(s.den() == Poly::variable({Multiset(d, {}), 1}));
    CHECK(s.num() == Poly(Rat(-3, 2)));

    // equality sees through residual common factors
    CHECK((x * x - y * y) / (x - y) == x + y);
    CHECK(x / fy + y / fy == (x + y) / fy);
    CHECK(x / fy != y / fy);
    CHECK((x - x).is_zero());
    CHECK((x / fy).is_polynomial() == false);
    CHECK((fy * x / fy).is_polynomial());

    CHECK(pow(x, 3) == x * x * x);
    CHECK(pow(fy, -2) * pow(fy, 2) == RatFunc(Poly(Rat(1))));
}

TEST_CASE("formulas convert to rational functions over a power of f_y") {
    RatFunc direct = ratfunc_of(raw_formula(Multiset(2, {1})), 2);
    CHECK(direct == -(var(2, {1}, 0) / var(2, {}, 1)));

    // terms with f_y in the numerator embed correctly too
    RawFormula mixed;
    mixed.add({{{RawSymbol{Multiset(1, {1}), 0}, 1}}, -2}, 1);
    mixed.add({{{RawSymbol{Multiset(1, {1}), 1}, 1}}, 1}, 3);
    RatFunc fy1 = var(1, {}, 1);
    CHECK(ratfunc_of(mixed, 1) ==
          var(1, {1}, 0) * fy1 * fy1 + RatFunc(Poly(Rat(3))) * var(1, {1}, 1) / fy1);
}

TEST_CASE("chain differentiation implements the implicit chain rule") {
    const int d = 2;
    RatFunc fy = var(d, {}, 1);

    CHECK(chain_diff(var(d, {1}, 0), 2) ==
          (var(d, {1, 2}, 0) * fy - var(d, {1}, 1) * var(d, {2}, 0)) / fy);
    CHECK(chain_diff(fy, 2) == (var(d, {2}, 1) * fy - var(d, {}, 2) * var(d, {2}, 0)) / fy);
    CHECK(chain_diff(RatFunc(Poly(Rat(7))), 1).is_zero());
    CHECK(chain_diff(RatFunc(), 1).is_zero());

    // mixed partials commute
    for (const RatFunc& e : {var(d, {1}, 1), oracle_yI(Multiset(d, {1})), var(d, {1}, 0) / fy}) {
        CHECK(chain_diff(chain_diff(e, 1), 2) == chain_diff(chain_diff(e, 2), 1));
    }
}

TEST_CASE("implicit derivatives are order independent and match the formulas") {
    CHECK(oracle_yI(Multiset(2, {1})) == -(var(2, {1}, 0) / var(2, {}, 1)));
    CHECK_THROWS_AS(oracle_yI(Multiset(2)), std::invalid_argument);
    CHECK_THROWS_AS(oracle_yI(Multiset(2, {1, 2}), {1, 1}), std::invalid_argument);

    CHECK(oracle_yI(Multiset(2, {1, 2})) == ratfunc_of(raw_formula(Multiset(2, {1, 2})), 2));
    CHECK(oracle_yI(Multiset(3, {1, 2, 3}), {3, 1, 2}) == oracle_yI(Multiset(3, {1, 2, 3})));
    CHECK(oracle_yI(Multiset(2, {1, 1, 2}), {2, 1, 1}) == oracle_yI(Multiset(2, {1, 1, 2})));

    for (int dims = 1; dims <= 2; ++dims)
        for (int size = 1; size <= 4; ++size)
            for (const auto& I : multisets_of_size(dims, size))
                CHECK(ratfunc_of(raw_formula(I), dims) == oracle_yI(I));
    for (int size = 2; size <= 3; ++size)
        for (const auto& I : multisets_of_size(3, size))
            CHECK(ratfunc_of(raw_formula(I), 3) == oracle_yI(I));
}

TEST_CASE("denominator-free recursion stays polynomial and tracks the oracle") {
    const int d = 2;
    CHECK(denfree_P(Multiset(d, {1})) == Rat(-1) * Poly::variable({Multiset(d, {1}), 0}));

    // second order: the cleared numerator of the classical formula
    Poly fy = Poly::variable({Multiset(d, {}), 1});
    Poly fyy = Poly::variable({Multiset(d, {}), 2});
    Poly f1 = Poly::variable({Multiset(d, {1}), 0});
    Poly f2 = Poly::variable({Multiset(d, {2}), 0});
    Poly expected = Rat(-1) * (Poly::variable({Multiset(d, {1, 2}), 0}) * fy * fy) +
                    Poly::variable({Multiset(d, {1}), 1}) * f2 * fy +
                    Poly::variable({Multiset(d, {2}), 1}) * f1 * fy - fyy * f1 * f2;
    CHECK(denfree_P(Multiset(d, {1, 2})) == expected);

    for (int dims = 1; dims <= 2; ++dims) {
        for (int size = 1; size <= 5; ++size) {
            for (const auto& I : multisets_of_size(dims, size)) {
                int n = static_cast<int>(I.size());
                RatFunc lifted = RatFunc(denfree_P(I)) /
                                 pow(RatFunc::variable({Multiset(dims), 1}), 2 * n - 1);
                CHECK(lifted == oracle_yI(I));
            }
        }
    }
    CHECK_THROWS_AS(denfree_P(Multiset(2)), std::invalid_argument);
}

TEST_CASE("slope substitution recovers the difference symbols") {
    CHECK(trans_check(Multiset(2), 0));
    CHECK(trans_check(Multiset(2), 3));
    for (int size = 1; size <= 4; ++size)
        for (const auto& J : multisets_of_size(2, size))
            for (int r = 0; r <= 2; ++r) CHECK(trans_check(J, r));
    CHECK(trans_check(Multiset(3, {1, 2, 3}), 1));
}

TEST_CASE("differentiating a difference symbol follows the three-term rule") {
    // empty J reduces to f_y^2 times the chain rule itself
    for (int r = 0; r <= 2; ++r) CHECK(derDelta_check(Multiset(2), r, 1));

    CHECK(derDelta_check(Multiset(2, {1}), 0, 2));
    CHECK(derDelta_check(Multiset(1, {1, 1}), 1, 1));

    for (int size = 0; size <= 3; ++size)
        for (const auto& J : multisets_of_size(2, size))
            for (int r = 0; r <= 2; ++r)
                for (int k = 1; k <= 2; ++k) CHECK(derDelta_check(J, r, k));
}

TEST_CASE("appending an index to a difference symbol splits into two terms") {
    // Delta_{J+j} f_{y^r} = f_y Delta_J f_{jy^r} - f_j Delta_J f_{y^(r+1)}
    for (int size = 0; size <= 4; ++size) {
        for (const auto& J : multisets_of_size(2, size)) {
            for (int r = 0; r <= 2; ++r) {
                for (int j = 1; j <= 2; ++j) {
                    RatFunc lhs = delta_rf(J.plus(j), RawSymbol{Multiset(2), r});
                    RatFunc rhs = var(2, {}, 1) * delta_rf(J, RawSymbol{Multiset(2, {j}), r}) -
                                  var(2, {j}, 0) * delta_rf(J, RawSymbol{Multiset(2), r + 1});
                    CHECK(lhs == rhs);
                }
            }
        }
    }
}
