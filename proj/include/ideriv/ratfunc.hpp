#ifndef IDERIV_RATFUNC_HPP
#define IDERIV_RATFUNC_HPP

// Exact multivariate polynomial and rational-function arithmetic over
// derivative indeterminates.  Unlike Formula, which singles out f_y as a
// denominator exponent, here every derivative f_{Hy^t} (f_y included) is an
// ordinary variable; this is the ground arithmetic the verification engine
// differentiates and compares in.
//
// RatFunc keeps a cheap canonical form: numerator and denominator are
// reduced by their common monomial factor, the denominator is scaled to
// primitive integer coefficients with a positive leading term, and the same
// scalar is applied to the numerator.  Full polynomial gcd reduction is
// deliberately not implemented; equality is decided by cross-multiplication,
// which is exact no matter how much common factor the two sides still carry.

#include "ideriv/formula.hpp"

#include <map>
#include <utility>
#include <vector>

namespace ideriv {

// sorted (symbol, exponent) list with positive exponents
using PolyMono = std::vector<std::pair<RawSymbol, int>>;

class Poly {
public:
    Poly() = default;
    explicit Poly(const Rat& c) {
        if (c != 0) terms_.emplace(PolyMono{}, c);
    }
    static Poly variable(const RawSymbol& s, int exp = 1) {
        Poly p;
        p.add_term({{s, exp}}, 1);
        return p;
    }

    /// Accumulates one term; sorts and merges the factor list, drops zeros.
    void add_term(PolyMono mono, Rat coeff) {
        if (coeff == 0) return;
        std::sort(mono.begin(), mono.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        PolyMono merged;
        for (auto& f : mono) {
            if (f.second == 0) continue;
            if (f.second < 0) throw std::invalid_argument("Poly: negative exponent");
            if (!merged.empty() && merged.back().first == f.first)
                merged.back().second += f.second;
            else
                merged.push_back(f);
        }
        auto it = terms_.find(merged);
        if (it == terms_.end()) {
            terms_.emplace(std::move(merged), std::move(coeff));
        } else {
            it->second += coeff;
            if (it->second == 0) terms_.erase(it);
        }
    }

    const std::map<PolyMono, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }
    Rat constant_value() const {
        if (is_zero()) return 0;
        if (!is_constant()) throw std::logic_error("Poly: not a constant");
        return terms_.begin()->second;
    }

    Poly& operator+=(const Poly& other) {
        for (const auto& [m, c] : other.terms_) add_term(m, c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    Poly operator-() const {
        Poly out;
        for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
        return out;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly out;
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                PolyMono m;
                auto ia = ma.begin();
                auto ib = mb.begin();
                while (ia != ma.end() || ib != mb.end()) {
                    if (ib == mb.end() || (ia != ma.end() && ia->first < ib->first))
                        m.push_back(*ia++);
                    else if (ia == ma.end() || ib->first < ia->first)
                        m.push_back(*ib++);
                    else {
                        m.push_back({ia->first, ia->second + ib->second});
                        ++ia, ++ib;
                    }
                }
                auto it = out.terms_.find(m);
                if (it == out.terms_.end()) {
                    out.terms_.emplace(std::move(m), ca * cb);
                } else {
                    it->second += ca * cb;
                    if (it->second == 0) out.terms_.erase(it);
                }
            }
        }
        return out;
    }
    friend Poly operator*(const Rat& c, const Poly& p) {
        Poly out;
        if (c == 0) return out;
        for (const auto& [m, k] : p.terms_) out.terms_.emplace(m, c * k);
        return out;
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Positive rational that scales the coefficients to coprime integers;
    /// zero for the zero polynomial.
    Rat content() const {
        Int num_gcd = 0, den_lcm = 1;
        for (const auto& [m, c] : terms_) {
            num_gcd = boost::multiprecision::gcd(num_gcd, boost::multiprecision::numerator(c));
            den_lcm = boost::multiprecision::lcm(den_lcm, boost::multiprecision::denominator(c));
        }
        if (num_gcd == 0) return 0;
        return Rat(num_gcd, den_lcm);
    }

    /// Coefficient of the canonically largest monomial; zero for zero.
    Rat leading_coefficient() const {
        return terms_.empty() ? Rat(0) : terms_.rbegin()->second;
    }

    /// Per-variable minimum exponent over all terms (the largest monomial
    /// dividing the polynomial); empty for zero or constant-containing polys.
    std::map<RawSymbol, int> common_monomial() const {
        std::map<RawSymbol, int> common;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            if (first) {
                for (const auto& [s, e] : m) common.emplace(s, e);
                first = false;
                continue;
            }
            std::map<RawSymbol, int> next;
            for (const auto& [s, e] : m) {
                auto it = common.find(s);
                if (it != common.end()) next.emplace(s, std::min(e, it->second));
            }
            common = std::move(next);
            if (common.empty()) break;
        }
        return common;
    }

    void scale(const Rat& c) {
        if (c == 0) throw std::invalid_argument("Poly: scaling by zero");
        for (auto& [m, k] : terms_) k *= c;
    }

    void divide_monomial(const std::map<RawSymbol, int>& mono) {
        if (mono.empty()) return;
        std::map<PolyMono, Rat> next;
        for (const auto& [m, c] : terms_) {
            PolyMono reduced;
            for (const auto& [s, e] : m) {
                auto it = mono.find(s);
                int drop = it == mono.end() ? 0 : it->second;
                if (e < drop) throw std::logic_error("Poly: monomial does not divide");
                if (e > drop) reduced.push_back({s, e - drop});
            }
            next.emplace(std::move(reduced), c);
        }
        terms_ = std::move(next);
    }

private:
    std::map<PolyMono, Rat> terms_;
};

class RatFunc {
public:
    RatFunc() : den_(Rat(1)) {}
    explicit RatFunc(Poly num) : num_(std::move(num)), den_(Rat(1)) { normalize(); }
    RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw std::invalid_argument("RatFunc: zero denominator");
        normalize();
    }
    static RatFunc variable(const RawSymbol& s) { return RatFunc(Poly::variable(s)); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_ == Poly(Rat(1)); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    RatFunc operator-() const {
        RatFunc out = *this;
        out.num_ = -out.num_;
        return out;
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw std::invalid_argument("RatFunc: division by zero");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }

    /// Exact equality by cross-multiplication; immune to residual common
    /// polynomial factors the cheap normalization leaves behind.
    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ * b.den_ == b.num_ * a.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

private:
    void normalize() {
        if (num_.is_zero()) {
            den_ = Poly(Rat(1));
            return;
        }
        // joint monomial factor
        auto mnum = num_.common_monomial();
        auto mden = den_.common_monomial();
        std::map<RawSymbol, int> shared;
        for (const auto& [s, e] : mnum) {
            auto it = mden.find(s);
            if (it != mden.end()) shared.emplace(s, std::min(e, it->second));
        }
        num_.divide_monomial(shared);
        den_.divide_monomial(shared);
        // primitive positive-leading denominator, same scalar on both sides
        Rat c = den_.content();
        if (den_.leading_coefficient() < 0) c = -c;
        num_.scale(1 / c);
        den_.scale(1 / c);
    }

    Poly num_;
    Poly den_;
};

/// Raised to an integer power; negative exponents invert.
inline RatFunc pow(const RatFunc& base, int e) {
    if (e < 0) return RatFunc(Poly(Rat(1))) / pow(base, -e);
    RatFunc out(Poly(Rat(1)));
    for (int k = 0; k < e; ++k) out = out * base;
    return out;
}

/// Reads a denominator-explicit formula as a single rational function over
/// the smallest sufficient power of f_y.
inline RatFunc ratfunc_of(const RawFormula& f, int dims) {
    int max_power = 0;
    for (const auto& [mono, coeff] : f.terms()) max_power = std::max(max_power, mono.fy_power);
    const RawSymbol fy{Multiset(dims), 1};
    Poly num;
    for (const auto& [mono, coeff] : f.terms()) {
        PolyMono m(mono.factors.begin(), mono.factors.end());
        if (max_power - mono.fy_power > 0) m.push_back({fy, max_power - mono.fy_power});
        num.add_term(std::move(m), coeff);
    }
    Poly den = max_power > 0 ? Poly::variable(fy, max_power) : Poly(Rat(1));
    return RatFunc(std::move(num), std::move(den));
}

}  // namespace ideriv

#endif
