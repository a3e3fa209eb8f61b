#ifndef IDERIV_COEFFICIENTS_HPP
#define IDERIV_COEFFICIENTS_HPP

// The integer coefficients attached to partition elements.  Each Alpha or
// Gamma contributes to the derivative formula with the coefficient
//     (sum r*m)! * I! / prod (r!^m * m! * J!^m)
// carrying the sign (-1)^(number of parts).  Besides the closed form this
// header provides three independent routes to the same numbers: a recursion
// that transports a whole coefficient level from order |I| to |I|+1, an
// unsigned four-term identity between neighbouring levels, and a literal
// balls-in-boxes count.  Their agreement is what the test suite leans on.

#include "ideriv/partitions.hpp"

#include <map>

namespace ideriv {

namespace detail {

template <class P>
Int closed_form_coefficient(const PartitionMap<P>& a, const Multiset& I, const char* caller) {
    if (!is_partition_of(a, I))
        throw std::invalid_argument(std::string(caller) + ": value does not decompose " +
                                    multiset_text(I));
    Int num = factorial(a.ydegree()) * mfact(I);
    Int den = 1;
    for (const auto& e : a.entries())
        den *= int_pow(factorial(e.first.r), e.second) * factorial(e.second) *
               int_pow(mfact(e.first.J), e.second);
    return exact_div(num, den);
}

}  // namespace detail

/// Unsigned coefficient of an Alpha in the difference-form expansion.
inline Int C_alpha(const Alpha& a, const Multiset& I) {
    return detail::closed_form_coefficient(a, I, "C_alpha");
}

/// Unsigned coefficient of a Gamma in the fully expanded form.
inline Int D_gamma(const Gamma& g, const Multiset& I) {
    return detail::closed_form_coefficient(g, I, "D_gamma");
}

/// Signed variants; the sign alternates with the number of parts.
inline Int c_alpha(const Alpha& a, const Multiset& I) {
    Int c = C_alpha(a, I);
    return a.part_count() % 2 == 0 ? c : -c;
}

inline Int d_gamma(const Gamma& g, const Multiset& I) {
    Int d = D_gamma(g, I);
    return g.part_count() % 2 == 0 ? d : -d;
}

using AlphaCoeffs = std::map<Alpha, Int>;

namespace detail {

/// Walks the three dual moves (un-merge an index, split a mixed pair off a
/// pure-y slot, drop a [k;1] part) shared by the signed recursion and the
/// unsigned identity.  The callback receives the neighbouring element, the
/// integer multiplier, and which of the three moves produced it (0, 1, 2);
/// guards are evaluated before any neighbour is materialized.
template <class Fn>
void for_each_dual_move(const Alpha& beta, int k, Fn&& visit) {
    const int dims = beta.dims();

    // Move 0: take one k out of a part of weight >= 3 containing it.
    for (const auto& e : beta.entries()) {
        const PartVec& jhat = e.first;
        if (jhat.J.count(k) == 0 || jhat.weight() == 2) continue;
        PartVec reduced{jhat.J.minus(k), jhat.r};
        Int mult = beta.multiplicity(reduced) + 1;
        visit(0, beta.adjusted(jhat, -1).adjusted(reduced, +1), mult);
    }

    // Move 1: absorb a [jk;0] part into a part with positive pure-y order.
    for (const auto& e : beta.entries()) {
        const PartVec& jhat = e.first;
        if (jhat.r == 0) continue;
        if (jhat.r == 1 && jhat.J == Multiset(dims, {k})) continue;
        for (int j = 1; j <= dims; ++j) {
            PartVec pair_jk{Multiset(dims, {j, k}), 0};
            if (beta.multiplicity(pair_jk) == 0) continue;
            PartVec grown{jhat.J.plus(j), jhat.r - 1};
            Int mult = Int(jhat.J.count(j) + 1) * Int(beta.multiplicity(grown) + 1);
            visit(1, beta.adjusted(jhat, -1).adjusted(pair_jk, -1).adjusted(grown, +1), mult);
        }
    }

    // Move 2: drop one [k;1] part.  The two classical multipliers are kept
    // separate (they cancel differently in the unsigned identity), hence two
    // callbacks with distinct move tags.
    PartVec k1{Multiset(dims, {k}), 1};
    if (beta.multiplicity(k1) > 0) {
        Alpha dropped = beta.adjusted(k1, -1);
        Int pair_weight = 0;
        for (int j = 1; j <= dims; ++j)
            pair_weight += Int(j == k ? 2 : 1) * beta.multiplicity({Multiset(dims, {j, k}), 0});
        visit(2, dropped, pair_weight);
        visit(3, Alpha(dropped), Int(beta.ydegree()));
    }
}

}  // namespace detail

/// Transports the signed coefficients one order up: given all signed values
/// on the order-|I| level, returns the signed coefficient of beta on the
/// order-|I|+1 level reached by appending the index k.
inline Int c_beta_recursive(const Multiset& I, int k, const Alpha& beta, const AlphaCoeffs& prior) {
    if (I.size() < 2) throw std::invalid_argument("c_beta_recursive: |I| must be at least 2");
    if (!is_partition_of(beta, I.plus(k)))
        throw std::invalid_argument("c_beta_recursive: beta does not decompose " +
                                    multiset_text(I.plus(k)));
    auto lookup = [&](const Alpha& a) -> const Int& {
        auto it = prior.find(a);
        if (it == prior.end())
            throw std::invalid_argument("c_beta_recursive: missing prior coefficient for " +
                                        compact_text(a));
        return it->second;
    };
    Int total = 0;
    detail::for_each_dual_move(beta, k, [&](int move, const Alpha& neighbour, const Int& mult) {
        // the un-merge contributes positively, everything else negatively
        if (move == 0)
            total += mult * lookup(neighbour);
        else
            total -= mult * lookup(neighbour);
    });
    return total;
}

/// Builds the full signed coefficient table for I by recursion from the
/// unique order-two element, peeling one index at a time.
inline AlphaCoeffs signed_coeffs_by_recursion(const Multiset& I) {
    if (I.size() < 2) throw std::invalid_argument("signed_coeffs_by_recursion: |I| must be at least 2");
    if (I.size() == 2) {
        AlphaCoeffs out;
        out[Alpha(I.dims(), {{PartVec{I, 0}, 1}})] = -1;
        return out;
    }
    int k = I.elements().front();
    Multiset base = I.minus(k);
    AlphaCoeffs prior = signed_coeffs_by_recursion(base);
    AlphaCoeffs out;
    for (const auto& beta : enumerate_A(I)) out[beta] = c_beta_recursive(base, k, beta, prior);
    return out;
}

/// Checks the unsigned four-term identity relating C_beta on level |I|+1 to
/// the C values of its dual neighbours on level |I|.  All terms enter with a
/// plus sign; the [k;1]-dropping neighbour appears twice with different
/// multipliers.
inline bool indcomb_check(const Multiset& I, int k, const Alpha& beta) {
    Multiset target = I.plus(k);
    if (!is_partition_of(beta, target))
        throw std::invalid_argument("indcomb_check: beta does not decompose " + multiset_text(target));
    Int total = 0;
    detail::for_each_dual_move(beta, k,
                               [&](int, const Alpha& neighbour, const Int& mult) {
                                   total += mult * C_alpha(neighbour, I);
                               });
    return total == C_alpha(beta, target);
}

/// Literal count of the combinatorial question behind C_alpha: distribute
/// the |I| index-colored balls plus h-1 extra marked balls into h identical
/// boxes so that the box contents realize exactly the parts of a (a box with
/// index multiset J and r marked balls realizes [J;r]).  Boxes are identical,
/// so we enumerate set partitions of the labeled balls into exactly h blocks
/// and match the block profile.
inline Int count_ball_placements(const Alpha& a, const Multiset& I) {
    if (!is_partition_of(a, I))
        throw std::invalid_argument("count_ball_placements: value does not decompose " +
                                    multiset_text(I));
    const int h = a.part_count();
    const int balls = I.size() + h - 1;
    if (balls > 12)
        throw std::invalid_argument("count_ball_placements: instance too large (|I|+h-1 > 12)");

    std::vector<int> color = I.elements();  // 0 marks the extra balls
    color.resize(balls, 0);

    std::vector<PartVec> want;
    for (const auto& e : a.entries())
        for (int c = 0; c < e.second; ++c) want.push_back(e.first);

    Int count = 0;
    std::vector<int> block(balls, 0);
    auto rec = [&](auto&& self, int pos, int used) -> void {
        if (pos == balls) {
            if (used != h) return;
            std::vector<PartVec> profile(h, PartVec{Multiset(I.dims()), 0});
            for (int b = 0; b < balls; ++b) {
                if (color[b] == 0)
                    ++profile[block[b]].r;
                else
                    profile[block[b]].J = profile[block[b]].J.plus(color[b]);
            }
            std::sort(profile.begin(), profile.end());
            if (profile == want) ++count;
            return;
        }
        int limit = std::min(used, h - 1);
        for (int b = 0; b <= limit; ++b) {
            block[pos] = b;
            self(self, pos + 1, std::max(used, b + 1));
        }
    };
    rec(rec, 0, 0);
    return count;
}

/// Splits C_alpha into the order-only factor (the coefficient the element
/// would carry if all indices were distinct, up to the index collapse) and
/// the index-collapse factor; the two multiply back to C_alpha exactly.
inline std::pair<Int, Int> collapse_decomposition(const Alpha& a, const Multiset& I) {
    if (!is_partition_of(a, I))
        throw std::invalid_argument("collapse_decomposition: value does not decompose " +
                                    multiset_text(I));
    Int fund_den = 1, coll_den = 1;
    for (const auto& e : a.entries()) {
        fund_den *= int_pow(factorial(e.first.r), e.second);
        if (e.first.J.empty())
            fund_den *= factorial(e.second);
        else
            coll_den *= factorial(e.second) * int_pow(mfact(e.first.J), e.second);
    }
    Int fundamental = exact_div(factorial(a.part_count() - 1), fund_den);
    Int collapse = exact_div(mfact(I), coll_den);
    return {fundamental, collapse};
}

}  // namespace ideriv

#endif  // IDERIV_COEFFICIENTS_HPP
