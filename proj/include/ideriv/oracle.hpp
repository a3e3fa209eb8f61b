#ifndef IDERIV_ORACLE_HPP
#define IDERIV_ORACLE_HPP

// Independent verification engine.  Starting from the first-order value
// y_k = -f_k/f_y, every higher implicit derivative is obtained by repeated
// formal differentiation along the solution manifold, where a derivative
// indeterminate f_{Hy^t} differentiates as
//
//   d/dx_k f_{Hy^t} = f_{(H+k)y^t} + f_{Hy^{t+1}} y_k
//                   = f_{(H+k)y^t} - f_{Hy^{t+1}} f_k / f_y.
//
// Nothing here shares code with the combinatorial formula assembly, so an
// agreement between the two is a genuine cross-check rather than a tautology.

#include "ideriv/ratfunc.hpp"

#include <algorithm>
#include <vector>

namespace ideriv {

namespace detail {

inline int poly_dims(const Poly& p) {
    for (const auto& [mono, coeff] : p.terms())
        if (!mono.empty()) return mono.front().first.H.dims();
    return 0;
}

/// f_y times the x_k-derivative of p along the solution manifold; the factor
/// f_y clears the single denominator the chain rule introduces, so the result
/// is again a polynomial.
inline Poly dpoly_along(const Poly& p, int k, int dims) {
    const RawSymbol fy{Multiset(dims), 1};
    const RawSymbol fk{Multiset(dims, {k}), 0};
    Poly out;
    for (const auto& [mono, coeff] : p.terms()) {
        for (std::size_t pos = 0; pos < mono.size(); ++pos) {
            const auto& [s, e] = mono[pos];
            PolyMono base;
            base.reserve(mono.size() + 2);
            for (std::size_t q = 0; q < mono.size(); ++q) {
                auto f = mono[q];
                if (q == pos && --f.second == 0) continue;
                base.push_back(f);
            }
            Rat c = Rat(e) * coeff;
            PolyMono up_x = base;
            up_x.push_back({RawSymbol{s.H.plus(k), s.t}, 1});
            up_x.push_back({fy, 1});
            out.add_term(std::move(up_x), c);
            PolyMono up_y = std::move(base);
            up_y.push_back({RawSymbol{s.H, s.t + 1}, 1});
            up_y.push_back({fk, 1});
            out.add_term(std::move(up_y), -c);
        }
    }
    return out;
}

}  // namespace detail

/// Formal d/dx_k of a rational function along the solution manifold.
inline RatFunc chain_diff(const RatFunc& e, int k) {
    int dims = detail::poly_dims(e.num());
    if (dims == 0) dims = detail::poly_dims(e.den());
    if (dims == 0) return RatFunc();  // constants differentiate to zero
    Poly dn = detail::dpoly_along(e.num(), k, dims);
    Poly dd = detail::dpoly_along(e.den(), k, dims);
    Poly fy = Poly::variable({Multiset(dims), 1});
    return RatFunc(dn * e.den() - e.num() * dd, fy * e.den() * e.den());
}

/// y_I by differentiating y_{i1} through the remaining indices in the given
/// order; the order must list exactly the indices of I.
inline RatFunc oracle_yI(const Multiset& I, const std::vector<int>& order) {
    if (I.size() < 1) throw std::invalid_argument("oracle_yI: |I| must be at least 1");
    Multiset check(I.dims());
    for (int i : order) check = check.plus(i);
    if (check != I) throw std::invalid_argument("oracle_yI: order must spell out I");
    const int dims = I.dims();
    RatFunc y(Rat(-1) * Poly::variable({Multiset(dims, {order.front()}), 0}),
              Poly::variable({Multiset(dims), 1}));
    for (std::size_t i = 1; i < order.size(); ++i) y = chain_diff(y, order[i]);
    return y;
}

inline RatFunc oracle_yI(const Multiset& I) { return oracle_yI(I, I.elements()); }

/// The denominator-free carrier P_I = f_y^(2n-1) y_I, built by the recursion
///   P_{I+j} = f_y^2 d/dx_j P_I - (2n-1)(f_{jy}f_y - f_{yy}f_j) P_I.
/// Every step must land back in the polynomial ring; a residual denominator
/// indicates a bug in the differentiation engine, not bad input.
inline Poly denfree_P(const Multiset& I) {
    if (I.size() < 1) throw std::invalid_argument("denfree_P: |I| must be at least 1");
    const int dims = I.dims();
    auto var = [&](const Multiset& H, int t) { return RatFunc::variable({H, t}); };
    const Multiset none(dims);
    const std::vector<int> idx = I.elements();
    RatFunc P(Rat(-1) * Poly::variable({Multiset(dims, {idx.front()}), 0}));
    for (std::size_t step = 1; step < idx.size(); ++step) {
        const int n = static_cast<int>(step);
        const int j = idx[step];
        RatFunc swing = var(Multiset(dims, {j}), 1) * var(none, 1) -
                        var(none, 2) * var(Multiset(dims, {j}), 0);
        P = var(none, 1) * var(none, 1) * chain_diff(P, j) -
            RatFunc(Poly(Rat(2 * n - 1))) * swing * P;
        if (!P.is_polynomial())
            throw std::logic_error("denfree_P: recursion left the polynomial ring");
    }
    return P.num();
}

/// Checks the variable-shift reading of the difference symbol: substituting
/// the first-order slopes lambda_i = -f_i/f_y into the binomial expansion
///   sum_K binom(J,K) f_{(J\K)y^(r+|K|)} prod lambda_i^kappa_i
/// recovers the expanded difference symbol over f_y^|J|.  The slopes carry
/// the alternating sign themselves, so no explicit (-1)^|K| appears.
inline bool trans_check(const Multiset& J, int r) {
    const int dims = J.dims();
    const RatFunc fy = RatFunc::variable({Multiset(dims), 1});
    std::vector<RatFunc> lambda;
    for (int i = 1; i <= dims; ++i)
        lambda.push_back(RatFunc(Rat(-1) * Poly::variable({Multiset(dims, {i}), 0})) / fy);
    RatFunc lhs;
    for (const auto& K : submultisets(J)) {
        RatFunc term(Poly(Rat(mbinom(J, K))));
        term = term * RatFunc::variable({J - K, r + static_cast<int>(K.size())});
        for (int i = 1; i <= dims; ++i)
            if (K.count(i) > 0) term = term * pow(lambda[i - 1], K.count(i));
        lhs = lhs + term;
    }
    RatFunc rhs = ratfunc_of(expand_delta(J, RawSymbol{Multiset(dims), r}), dims) /
                  pow(fy, static_cast<int>(J.size()));
    return lhs == rhs;
}

/// Checks the differentiation rule for expanded difference symbols with
/// g = f_{y^r}:
///   f_y^2 d/dx_k (Delta_J g) =
///     f_y Delta_{J+k} g + |J| Delta_k f_y Delta_J g
///     - sum_j eta_j Delta_{jk} f Delta_{J\j} g_y.
inline bool derDelta_check(const Multiset& J, int r, int k) {
    const int dims = J.dims();
    auto E = [&](const Multiset& Jp, int rp) {
        return ratfunc_of(expand_delta(Jp, RawSymbol{Multiset(dims), rp}), dims);
    };
    const RatFunc fy = RatFunc::variable({Multiset(dims), 1});
    RatFunc lhs = fy * fy * chain_diff(E(J, r), k);
    RatFunc rhs = fy * E(J.plus(k), r) +
                  RatFunc(Poly(Rat(static_cast<int>(J.size())))) * E(Multiset(dims, {k}), 1) * E(J, r);
    for (int j = 1; j <= dims; ++j) {
        int eta = J.count(j);
        if (eta == 0) continue;
        rhs = rhs - RatFunc(Poly(Rat(eta))) * E(Multiset(dims, {j, k}), 0) * E(J.minus(j), r + 1);
    }
    return lhs == rhs;
}

}  // namespace ideriv

#endif
