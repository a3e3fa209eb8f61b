#ifndef IDERIV_FORMULA_HPP
#define IDERIV_FORMULA_HPP

// Symbolic derivative formulas.  A Formula is a normalized sum of monomials
// in derivative symbols over a power of f_y; two symbol alphabets are used:
//
//   DeltaSymbol  the difference building block D_J f_{y^r}, an alternating
//                binomial combination of raw derivatives that vanishes in a
//                controlled way along the solution manifold;
//   RawSymbol    a plain partial derivative f_{Hy^t}.
//
// The implicit derivative of order I has one closed form over each alphabet
// (delta_formula and raw_formula); expanding every DeltaSymbol via its
// definition must turn the first into the second, coefficient by coefficient,
// which is the strongest internal consistency check this library offers.
//
// f_y itself is never stored as a monomial factor: its exponent lives in the
// monomial's fy_power field (positive = denominator).  The bare symbol f,
// i.e. (empty,0), can appear only in the degenerate expansion of D_J applied
// to f itself with J empty; the shipped formulas never contain it.

#include "ideriv/coefficients.hpp"

#include <map>
#include <string>
#include <tuple>

namespace ideriv {

struct DeltaSymbol {
    Multiset J;
    int r = 0;

    friend bool operator==(const DeltaSymbol& a, const DeltaSymbol& b) {
        return a.r == b.r && a.J == b.J;
    }
    friend bool operator<(const DeltaSymbol& a, const DeltaSymbol& b) {
        return PartVec{a.J, a.r} < PartVec{b.J, b.r};
    }
};

struct RawSymbol {
    Multiset H;
    int t = 0;

    friend bool operator==(const RawSymbol& a, const RawSymbol& b) {
        return a.t == b.t && a.H == b.H;
    }
    friend bool operator<(const RawSymbol& a, const RawSymbol& b) {
        return PartVec{a.H, a.t} < PartVec{b.H, b.t};
    }
};

template <class Sym>
struct Monomial {
    std::vector<std::pair<Sym, int>> factors;  // sorted, exponents positive
    int fy_power = 0;  // f_y exponent in the denominator (negative = numerator)

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.fy_power == b.fy_power && a.factors == b.factors;
    }
    friend bool operator<(const Monomial& a, const Monomial& b) {
        if (a.fy_power != b.fy_power) return a.fy_power < b.fy_power;
        return a.factors < b.factors;
    }

    Monomial operator*(const Monomial& other) const {
        Monomial out;
        out.fy_power = fy_power + other.fy_power;
        auto a = factors.begin(), b = other.factors.begin();
        while (a != factors.end() || b != other.factors.end()) {
            if (b == other.factors.end() || (a != factors.end() && a->first < b->first))
                out.factors.push_back(*a++);
            else if (a == factors.end() || b->first < a->first)
                out.factors.push_back(*b++);
            else {
                out.factors.push_back({a->first, a->second + b->second});
                ++a, ++b;
            }
        }
        return out;
    }
};

template <class Sym>
class Formula {
public:
    using Term = Monomial<Sym>;

    Formula() = default;

    static Formula constant(Rat c, int fy_power = 0) {
        Formula f;
        Term t;
        t.fy_power = fy_power;
        f.add(t, std::move(c));
        return f;
    }

    /// Accumulates a term; sorts/merges the factor list, drops zero entries.
    void add(Term term, Rat coeff) {
        if (coeff == 0) return;
        std::sort(term.factors.begin(), term.factors.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<Sym, int>> merged;
        for (auto& f : term.factors) {
            if (f.second == 0) continue;
            if (f.second < 0) throw std::invalid_argument("Formula: negative symbol exponent");
            if (!merged.empty() && merged.back().first == f.first)
                merged.back().second += f.second;
            else
                merged.push_back(f);
        }
        term.factors = std::move(merged);
        auto it = terms_.find(term);
        if (it == terms_.end()) {
            terms_.emplace(std::move(term), std::move(coeff));
        } else {
            it->second += coeff;
            if (it->second == 0) terms_.erase(it);
        }
    }

    const std::map<Term, Rat>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    Formula& operator+=(const Formula& other) {
        for (const auto& [t, c] : other.terms_) add(t, c);
        return *this;
    }
    friend Formula operator+(Formula a, const Formula& b) { return a += b; }

    Formula operator-() const {
        Formula out;
        for (const auto& [t, c] : terms_) out.terms_.emplace(t, -c);
        return out;
    }
    friend Formula operator-(const Formula& a, const Formula& b) { return a + (-b); }

    friend Formula operator*(const Formula& a, const Formula& b) {
        Formula out;
        for (const auto& [ta, ca] : a.terms_)
            for (const auto& [tb, cb] : b.terms_) out.add(ta * tb, ca * cb);
        return out;
    }
    friend Formula operator*(const Rat& c, const Formula& f) {
        Formula out;
        if (c == 0) return out;
        for (const auto& [t, k] : f.terms_) out.terms_.emplace(t, c * k);
        return out;
    }

    friend bool operator==(const Formula& a, const Formula& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

private:
    std::map<Term, Rat> terms_;
};

using DeltaFormula = Formula<DeltaSymbol>;
using RawFormula = Formula<RawSymbol>;

/// The derivative y_I as a signed sum over Alphas of products of
/// DeltaSymbols over f_y^(|I|+h).
inline DeltaFormula delta_formula(const Multiset& I) {
    if (I.size() < 2) throw std::invalid_argument("delta_formula: |I| must be at least 2");
    DeltaFormula out;
    for (const auto& a : enumerate_A(I)) {
        Monomial<DeltaSymbol> m;
        for (const auto& e : a.entries()) m.factors.push_back({DeltaSymbol{e.first.J, e.first.r}, e.second});
        m.fy_power = I.size() + a.part_count();
        out.add(std::move(m), Rat(c_alpha(a, I)));
    }
    return out;
}

/// The derivative y_I as a signed sum over Gammas of products of raw
/// derivatives over f_y^g.
inline RawFormula raw_formula(const Multiset& I) {
    if (I.size() < 1) throw std::invalid_argument("raw_formula: |I| must be at least 1");
    RawFormula out;
    for (const auto& gm : enumerate_B(I)) {
        Monomial<RawSymbol> m;
        for (const auto& e : gm.entries()) m.factors.push_back({RawSymbol{e.first.J, e.first.r}, e.second});
        m.fy_power = gm.part_count();
        out.add(std::move(m), Rat(d_gamma(gm, I)));
    }
    return out;
}

/// Expands D_J applied to an arbitrary raw derivative g = f_{Hy^t}:
///   sum over K contained in J of
///   (-1)^|K| binom(J,K) f_{(H+J-K) y^(t+|K|)} prod_i f_i^kappa_i f_y^(|J|-|K|).
/// The result is denominator free (fy_power <= 0 in every term).
inline RawFormula expand_delta(const Multiset& J, const RawSymbol& g) {
    if (J.dims() != g.H.dims()) throw std::invalid_argument("expand_delta: dimension mismatch");
    RawFormula out;
    const int dims = J.dims();
    for (const auto& K : submultisets(J)) {
        Monomial<RawSymbol> m;
        m.fy_power = -(J.size() - K.size());
        RawSymbol lead{g.H + (J - K), g.t + K.size()};
        if (lead.H.empty() && lead.t == 1)
            m.fy_power -= 1;  // f_y is tracked in the exponent, not as a factor
        else
            m.factors.push_back({lead, 1});
        for (int i = 1; i <= dims; ++i)
            if (K.count(i) > 0) m.factors.push_back({RawSymbol{Multiset(dims, {i}), 0}, K.count(i)});
        Rat coeff = Rat(mbinom(J, K));
        if (K.size() % 2 != 0) coeff = -coeff;
        out.add(std::move(m), std::move(coeff));
    }
    return out;
}

inline RawFormula expand_delta(const DeltaSymbol& d) {
    return expand_delta(d.J, RawSymbol{Multiset(d.J.dims()), d.r});
}

/// Substitutes the definition of every DeltaSymbol into a delta-form formula;
/// the f_y powers produced by the expansion cancel against the denominator
/// exponent automatically.
inline RawFormula expand_delta_formula(const DeltaFormula& df) {
    std::map<DeltaSymbol, RawFormula> cache;
    RawFormula out;
    for (const auto& [mono, coeff] : df.terms()) {
        RawFormula acc = RawFormula::constant(coeff, mono.fy_power);
        for (const auto& [sym, exp] : mono.factors) {
            auto it = cache.find(sym);
            if (it == cache.end()) it = cache.emplace(sym, expand_delta(sym)).first;
            for (int k = 0; k < exp; ++k) acc = acc * it->second;
        }
        out += acc;
    }
    return out;
}

/// The strongest internal consistency check: expanding the difference form
/// must reproduce the raw form symbol for symbol.
inline bool expand_and_compare(const Multiset& I) {
    if (I.size() < 2) throw std::invalid_argument("expand_and_compare: |I| must be at least 2");
    return expand_delta_formula(delta_formula(I)) == raw_formula(I);
}

/// Drops every monomial containing a first-order x-derivative of f; the
/// remainder is the formula specialized to critical points of the constraint
/// in the x-directions.
inline RawFormula drop_singleton_monomials(const RawFormula& f) {
    RawFormula out;
    for (const auto& [mono, coeff] : f.terms()) {
        bool has_single = false;
        for (const auto& [sym, exp] : mono.factors)
            if (sym.t == 0 && sym.H.size() == 1) has_single = true;
        if (!has_single) out.add(mono, coeff);
    }
    return out;
}

/// Direct form of y_I under the assumption that all first-order
/// x-derivatives of f vanish at the point: the Alpha sum with each
/// DeltaSymbol replaced by the bare raw derivative, over f_y^h.
inline RawFormula fi_zero_formula(const Multiset& I) {
    if (I.size() < 2) throw std::invalid_argument("fi_zero_formula: |I| must be at least 2");
    RawFormula out;
    for (const auto& a : enumerate_A(I)) {
        Monomial<RawSymbol> m;
        for (const auto& e : a.entries()) m.factors.push_back({RawSymbol{e.first.J, e.first.r}, e.second});
        m.fy_power = a.part_count();
        out.add(std::move(m), Rat(c_alpha(a, I)));
    }
    return out;
}

/// Applies an index permutation to every symbol of a formula.
inline RawFormula permuted(const RawFormula& f, const std::vector<int>& sigma) {
    RawFormula out;
    for (const auto& [mono, coeff] : f.terms()) {
        Monomial<RawSymbol> m;
        m.fy_power = mono.fy_power;
        for (const auto& [sym, exp] : mono.factors)
            m.factors.push_back({RawSymbol{permuted(sym.H, sigma), sym.t}, exp});
        out.add(std::move(m), coeff);
    }
    return out;
}

inline DeltaFormula permuted(const DeltaFormula& f, const std::vector<int>& sigma) {
    DeltaFormula out;
    for (const auto& [mono, coeff] : f.terms()) {
        Monomial<DeltaSymbol> m;
        m.fy_power = mono.fy_power;
        for (const auto& [sym, exp] : mono.factors)
            m.factors.push_back({DeltaSymbol{permuted(sym.J, sigma), sym.r}, exp});
        out.add(std::move(m), coeff);
    }
    return out;
}

// --- the Z-collection machinery -------------------------------------------
//
// Expanding the difference form produces, for each Gamma, a sum over ways of
// tracing every first-order factor f_i back to the expansion step that
// created it.  One such trace assigns to each part (H,t) of weight >= 2 a
// splitting of its multiplicity s_{H,t} over index multisets K with |K| <= t
// (which K was pulled out of the pure-y slots), so that the pulled-out
// indices add up over all parts to the singleton multiplicities s_{i,0}.

struct ZAssignment {
    // Positive entries q for each ((H,t), K), canonically ordered.
    std::vector<std::tuple<PartVec, Multiset, int>> q;

    friend bool operator==(const ZAssignment& a, const ZAssignment& b) { return a.q == b.q; }
};

namespace detail {

inline void check_zgamma_hypothesis(const Gamma& gamma, int& g_out, Multiset& singles_out) {
    const int dims = gamma.dims();
    Multiset singles(dims);
    for (int i = 1; i <= dims; ++i) {
        int s = gamma.multiplicity({Multiset(dims, {i}), 0});
        for (int c = 0; c < s; ++c) singles = singles.plus(i);
    }
    int g = gamma.ydegree() + 1;
    if (singles.size() > g - 1)
        throw std::invalid_argument(
            "zgamma: singleton multiplicities exceed the pure-y budget (hypothesis violated)");
    g_out = g;
    singles_out = singles;
}

/// All multisets K over {1..dims} with K contained in cap and |K| <= maxsize.
inline std::vector<Multiset> bounded_submultisets(const Multiset& cap, int maxsize) {
    std::vector<Multiset> out;
    for (const auto& K : submultisets(cap))
        if (K.size() <= maxsize) out.push_back(K);
    return out;
}

}  // namespace detail

/// Enumerates all trace collections for gamma.  Throws if the singleton
/// weight exceeds the pure-y budget g-1.
inline std::vector<ZAssignment> zgamma_enumerate(const Gamma& gamma) {
    int g = 0;
    Multiset singles(gamma.dims());
    detail::check_zgamma_hypothesis(gamma, g, singles);

    std::vector<std::pair<PartVec, int>> heavy;  // parts of weight >= 2
    for (const auto& e : gamma.entries())
        if (e.first.weight() >= 2) heavy.push_back(e);

    std::vector<ZAssignment> out;
    ZAssignment cur;
    // Distribute each part's multiplicity over admissible K, then require the
    // pulled-out indices to consume the singleton budget exactly.
    auto place_entry = [&](auto&& self, std::size_t idx, const Multiset& budget) -> void {
        if (idx == heavy.size()) {
            if (budget.empty()) out.push_back(cur);
            return;
        }
        const auto& [part, s] = heavy[idx];
        auto ks = detail::bounded_submultisets(budget, part.r);
        auto split = [&](auto&& inner, std::size_t kidx, int left, const Multiset& rem) -> void {
            if (kidx == ks.size()) {
                if (left == 0) self(self, idx + 1, rem);
                return;
            }
            // the empty pull-out set is always a candidate, so any leftover
            // multiplicity can land there and the split stays exhaustive
            const Multiset& K = ks[kidx];
            int fit = left;
            if (!K.empty()) {
                for (int i = 1; i <= gamma.dims(); ++i)
                    if (K.count(i) > 0) fit = std::min(fit, rem.count(i) / K.count(i));
            }
            Multiset shrunk = rem;
            for (int q = 0; q <= fit; ++q) {
                if (q > 0) {
                    shrunk = shrunk - K;
                    cur.q.push_back({part, K, q});
                }
                inner(inner, kidx + 1, left - q, shrunk);
                if (q > 0) cur.q.pop_back();
            }
        };
        split(split, 0, s, budget);
    };
    place_entry(place_entry, 0, singles);
    return out;
}

/// Left-hand side of the trace-counting identity: the weighted count of all
/// trace collections.  Must equal the multinomial coefficient
/// (g-1 choose s_{1,0},...,s_{N,0}).
inline Int zgamma_sum(const Gamma& gamma) {
    int g = 0;
    Multiset singles(gamma.dims());
    detail::check_zgamma_hypothesis(gamma, g, singles);
    Int total = 0;
    for (const auto& za : zgamma_enumerate(gamma)) {
        // per part: s! * prod_K binom(t,K)^q / q!, an integer since the q
        // values split s
        Int value = 1;
        std::map<PartVec, Int> qfact;  // prod q! per part
        for (const auto& [part, K, q] : za.q) {
            qfact.emplace(part, 1).first->second *= factorial(q);
            value *= int_pow(tbinom(part.r, K), q);
        }
        for (const auto& e : gamma.entries()) {
            if (e.first.weight() < 2) continue;
            Int fact_prod = 1;
            if (auto it = qfact.find(e.first); it != qfact.end()) fact_prod = it->second;
            value *= exact_div(factorial(e.second), fact_prod);
        }
        total += value;
    }
    return total;
}

/// Right-hand side of the trace-counting identity.
inline Int zgamma_multinomial(const Gamma& gamma) {
    int g = 0;
    Multiset singles(gamma.dims());
    detail::check_zgamma_hypothesis(gamma, g, singles);
    Int value = factorial(g - 1);
    for (int c : singles.counts()) value = exact_div(value, factorial(c));
    return exact_div(value, factorial(g - 1 - singles.size()));
}

// --- rendering --------------------------------------------------------------

enum class RenderStyle { plain, latex };

namespace detail {

inline std::string subscript_body(const Multiset& m, int t, RenderStyle style) {
    std::string s;
    bool wide = m.dims() > 9;
    for (int i : m.elements()) {
        if (!s.empty() && wide) s += ',';
        s += std::to_string(i);
    }
    if (t == 1)
        s += "y";
    else if (t == 2)
        s += "yy";
    else if (t >= 3)
        s += style == RenderStyle::latex ? "y^{" + std::to_string(t) + "}" : "y^" + std::to_string(t);
    return s;
}

inline std::string symbol_text(const RawSymbol& sym, RenderStyle style) {
    std::string sub = subscript_body(sym.H, sym.t, style);
    if (sub.empty()) return "f";
    if (sub.size() == 1 && style == RenderStyle::plain) return "f_" + sub;
    return "f_{" + sub + "}";
}

inline std::string symbol_text(const DeltaSymbol& sym, RenderStyle style) {
    // the difference operator over no indices is the identity, so print the
    // plain derivative it wraps
    if (sym.J.empty()) return symbol_text(RawSymbol{sym.J, sym.r}, style);
    std::string sub;
    bool wide = sym.J.dims() > 9;
    for (int i : sym.J.elements()) {
        if (!sub.empty() && wide) sub += ',';
        sub += std::to_string(i);
    }
    std::string head = style == RenderStyle::latex ? "\\Delta" : "Δ";
    if (sub.size() == 1 && style == RenderStyle::plain)
        head += "_" + sub;
    else
        head += "_{" + sub + "}";
    return head + symbol_text(RawSymbol{Multiset(sym.J.dims()), sym.r}, style);
}

inline std::string factor_text(const RawSymbol& sym, int exp, RenderStyle style) {
    std::string s = symbol_text(sym, style);
    if (exp > 1) s += style == RenderStyle::latex ? "^{" + std::to_string(exp) + "}" : "^" + std::to_string(exp);
    return s;
}

inline std::string factor_text(const DeltaSymbol& sym, int exp, RenderStyle style) {
    std::string s = symbol_text(sym, style);
    if (!sym.J.empty() && (style == RenderStyle::plain || exp > 1)) s = "(" + s + ")";
    if (exp > 1) s += style == RenderStyle::latex ? "^{" + std::to_string(exp) + "}" : "^" + std::to_string(exp);
    return s;
}

inline std::string fy_text(int exp, RenderStyle style) {
    std::string s = style == RenderStyle::latex ? "f_{y}" : "f_y";
    if (exp > 1) s += style == RenderStyle::latex ? "^{" + std::to_string(exp) + "}" : "^" + std::to_string(exp);
    return s;
}

}  // namespace detail

/// Deterministic text rendering.  Factors print heaviest first (the way the
/// formulas are usually typeset); terms follow the canonical monomial order.
template <class Sym>
std::string render(const Formula<Sym>& f, RenderStyle style) {
    if (f.is_zero()) return "0";
    std::string out;
    for (const auto& [mono, coeff] : f.terms()) {
        Rat mag = coeff < 0 ? Rat(-coeff) : coeff;
        if (out.empty())
            out += coeff < 0 ? "-" : "";
        else
            out += coeff < 0 ? " - " : " + ";

        std::string numerator;
        if (mag != 1) {
            std::string c = rat_text(mag);
            numerator += c.find('/') == std::string::npos ? c : "(" + c + ")";
        }
        for (auto it = mono.factors.rbegin(); it != mono.factors.rend(); ++it)
            numerator += detail::factor_text(it->first, it->second, style);
        if (mono.fy_power < 0) numerator += detail::fy_text(-mono.fy_power, style);
        if (numerator.empty()) numerator = "1";

        if (mono.fy_power > 0) {
            if (style == RenderStyle::latex)
                out += "\\frac{" + numerator + "}{" + detail::fy_text(mono.fy_power, style) + "}";
            else
                out += numerator + "/" + detail::fy_text(mono.fy_power, style);
        } else {
            out += numerator;
        }
    }
    return out;
}

}  // namespace ideriv

#endif  // IDERIV_FORMULA_HPP
