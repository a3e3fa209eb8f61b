#ifndef IDERIV_POLYSYS_HPP
#define IDERIV_POLYSYS_HPP

// Polynomial constraint systems f(x_1..x_N, y) = 0 with exact rational
// coefficients.  These are the test problems for the numeric layer: their
// partial derivatives evaluate exactly, and the implicit solution y(x) has a
// computable power-series expansion around the base point, so every formula
// can be checked end to end without tolerances.

#include "ideriv/multiset.hpp"
#include "ideriv/numeric.hpp"

#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ideriv {

// exponents of one monomial x^E y^e
struct XYMono {
    std::vector<int> x;
    int y = 0;

    friend bool operator==(const XYMono& a, const XYMono& b) { return a.y == b.y && a.x == b.x; }
    friend bool operator<(const XYMono& a, const XYMono& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    }
};

class PolyXY {
public:
    explicit PolyXY(int dims) : dims_(dims) {
        if (dims < 0) throw std::invalid_argument("PolyXY: negative dimension");
    }
    static PolyXY constant(int dims, const Rat& c) {
        PolyXY p(dims);
        p.add_term({std::vector<int>(dims, 0), 0}, c);
        return p;
    }
    static PolyXY x_var(int dims, int i) {
        PolyXY p(dims);
        if (i < 1 || i > dims) throw std::invalid_argument("PolyXY: variable index out of range");
        std::vector<int> e(dims, 0);
        e[i - 1] = 1;
        p.add_term({std::move(e), 0}, 1);
        return p;
    }
    static PolyXY y_var(int dims) {
        PolyXY p(dims);
        p.add_term({std::vector<int>(dims, 0), 1}, 1);
        return p;
    }

    int dims() const { return dims_; }
    const std::map<XYMono, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(XYMono mono, const Rat& coeff) {
        if (static_cast<int>(mono.x.size()) != dims_)
            throw std::invalid_argument("PolyXY: exponent vector has wrong length");
        for (int e : mono.x)
            if (e < 0) throw std::invalid_argument("PolyXY: negative exponent");
        if (mono.y < 0) throw std::invalid_argument("PolyXY: negative exponent");
        if (coeff == 0) return;
        auto it = terms_.find(mono);
        if (it == terms_.end()) {
            terms_.emplace(std::move(mono), coeff);
        } else {
            it->second += coeff;
            if (it->second == 0) terms_.erase(it);
        }
    }

    PolyXY& operator+=(const PolyXY& other) {
        require_same_dims(other);
        for (const auto& [m, c] : other.terms_) add_term(m, c);
        return *this;
    }
    friend PolyXY operator+(PolyXY a, const PolyXY& b) { return a += b; }
    PolyXY operator-() const {
        PolyXY out(dims_);
        for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
        return out;
    }
    friend PolyXY operator-(const PolyXY& a, const PolyXY& b) { return a + (-b); }
    friend PolyXY operator*(const PolyXY& a, const PolyXY& b) {
        a.require_same_dims(b);
        PolyXY out(a.dims_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                XYMono m{ma.x, ma.y + mb.y};
                for (int i = 0; i < a.dims_; ++i) m.x[i] += mb.x[i];
                out.add_term(std::move(m), ca * cb);
            }
        }
        return out;
    }
    friend PolyXY operator*(const Rat& c, const PolyXY& p) {
        PolyXY out(p.dims_);
        if (c == 0) return out;
        for (const auto& [m, k] : p.terms_) out.terms_.emplace(m, c * k);
        return out;
    }
    friend bool operator==(const PolyXY& a, const PolyXY& b) {
        return a.dims_ == b.dims_ && a.terms_ == b.terms_;
    }

    PolyXY dx(int i) const {
        if (i < 1 || i > dims_) throw std::invalid_argument("PolyXY: variable index out of range");
        PolyXY out(dims_);
        for (const auto& [m, c] : terms_) {
            if (m.x[i - 1] == 0) continue;
            XYMono d = m;
            d.x[i - 1] -= 1;
            out.add_term(std::move(d), Rat(m.x[i - 1]) * c);
        }
        return out;
    }
    PolyXY dy() const {
        PolyXY out(dims_);
        for (const auto& [m, c] : terms_) {
            if (m.y == 0) continue;
            XYMono d = m;
            d.y -= 1;
            out.add_term(std::move(d), Rat(m.y) * c);
        }
        return out;
    }

    Rat eval(const std::vector<Rat>& x0, const Rat& y0) const {
        if (static_cast<int>(x0.size()) != dims_)
            throw std::invalid_argument("PolyXY: point has wrong dimension");
        Rat total = 0;
        for (const auto& [m, c] : terms_) {
            Rat v = c * rat_pow(y0, m.y);
            for (int i = 0; i < dims_; ++i) v *= rat_pow(x0[i], m.x[i]);
            total += v;
        }
        return total;
    }

    int total_degree() const {
        int deg = 0;
        for (const auto& [m, c] : terms_) {
            int d = m.y;
            for (int e : m.x) d += e;
            deg = std::max(deg, d);
        }
        return deg;
    }

private:
    void require_same_dims(const PolyXY& other) const {
        if (dims_ != other.dims_) throw std::invalid_argument("PolyXY: dimension mismatch");
    }

    int dims_;
    std::map<XYMono, Rat> terms_;
};

/// Parses "y^2 + x1 - 1", "3/2*x1*x2^2 - y", "0.5x1 + y^3".  Terms are sums
/// of signed products of numbers and variables (x<k> or y) with optional ^
/// exponents; '*' between factors is optional.  No parentheses.
inline PolyXY parse_polyxy(const std::string& text, int dims) {
    PolyXY out(dims);
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto parse_int = [&]() -> int {
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw std::invalid_argument("polynomial: expected an integer at '" +
                                                      text.substr(start) + "'");
        return std::stoi(text.substr(start, pos - start));
    };
    auto parse_number = [&]() -> Rat {
        std::size_t start = pos;
        while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '.'))
            ++pos;
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            std::size_t mark = pos++;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            } else {
                pos = mark;  // the 'e' was not an exponent
            }
        }
        if (pos < text.size() && text[pos] == '/' && pos + 1 < text.size() &&
            std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        return parse_rat(text.substr(start, pos - start));
    };

    skip_ws();
    if (pos == text.size()) throw std::invalid_argument("polynomial: empty input");
    bool first = true;
    while (true) {
        skip_ws();
        if (pos == text.size()) {
            if (first) throw std::invalid_argument("polynomial: empty input");
            break;
        }
        int sign = 1;
        if (text[pos] == '+' || text[pos] == '-') {
            sign = text[pos] == '-' ? -1 : 1;
            ++pos;
        } else if (!first) {
            throw std::invalid_argument("polynomial: expected '+' or '-' at '" +
                                        text.substr(pos) + "'");
        }
        first = false;

        Rat coeff = sign;
        std::vector<int> xexp(dims, 0);
        int yexp = 0;
        bool saw_factor = false;
        while (true) {
            skip_ws();
            if (pos < text.size() && text[pos] == '*') {
                if (!saw_factor)
                    throw std::invalid_argument("polynomial: '*' without a left factor");
                ++pos;
                skip_ws();
            }
            if (pos == text.size() || text[pos] == '+' || text[pos] == '-') break;
            char c = text[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                coeff *= parse_number();
            } else if (c == 'x' || c == 'y') {
                ++pos;
                int slot = -1;
                if (c == 'x') {
                    int i = parse_int();
                    if (i < 1 || i > dims)
                        throw std::invalid_argument("polynomial: x" + std::to_string(i) +
                                                    " is out of range");
                    slot = i - 1;
                }
                int e = 1;
                if (pos < text.size() && text[pos] == '^') {
                    ++pos;
                    e = parse_int();
                }
                if (slot >= 0)
                    xexp[slot] += e;
                else
                    yexp += e;
            } else {
                throw std::invalid_argument("polynomial: unexpected character '" +
                                            std::string(1, c) + "'");
            }
            saw_factor = true;
        }
        if (!saw_factor) throw std::invalid_argument("polynomial: dangling sign");
        out.add_term({std::move(xexp), yexp}, coeff);
    }
    return out;
}

/// A polynomial constraint together with a base point on its zero set where
/// the y-derivative does not vanish, so the implicit solution exists.
struct PolySystem {
    int dims;
    PolyXY f;
    std::vector<Rat> x0;
    Rat y0;

    PolySystem(PolyXY poly, std::vector<Rat> x, Rat y)
        : dims(poly.dims()), f(std::move(poly)), x0(std::move(x)), y0(std::move(y)) {
        if (static_cast<int>(x0.size()) != dims)
            throw std::invalid_argument("PolySystem: base point has wrong dimension");
        if (f.eval(x0, y0) != 0)
            throw std::invalid_argument("PolySystem: base point does not satisfy f = 0");
        if (f.dy().eval(x0, y0) == 0)
            throw std::invalid_argument("PolySystem: f_y vanishes at the base point");
    }
};

/// Replaces y by z + sum_i lambda_i (x_i - x0_i) with the first-order slopes
/// lambda_i = -f_i/f_y at the base point.  The new system has the same base
/// point and kills all first-order x-derivatives there; every y_I with
/// |I| >= 2 is unchanged.
inline PolySystem shifted_system(const PolySystem& p) {
    Rat fy = p.f.dy().eval(p.x0, p.y0);
    PolyXY sub = PolyXY::y_var(p.dims);
    for (int i = 1; i <= p.dims; ++i) {
        Rat lambda = -p.f.dx(i).eval(p.x0, p.y0) / fy;
        sub += lambda * (PolyXY::x_var(p.dims, i) - PolyXY::constant(p.dims, p.x0[i - 1]));
    }
    PolyXY composed(p.dims);
    for (const auto& [m, c] : p.f.terms()) {
        PolyXY term = PolyXY::constant(p.dims, c);
        XYMono xonly{m.x, 0};
        PolyXY xpart(p.dims);
        xpart.add_term(std::move(xonly), 1);
        term = term * xpart;
        for (int k = 0; k < m.y; ++k) term = term * sub;
        composed += term;
    }
    return PolySystem(std::move(composed), p.x0, p.y0);
}

namespace detail {

// truncated multivariate power series in the offsets u = x - x0
using Series = std::map<std::vector<int>, Rat>;

inline int series_degree(const std::vector<int>& e) {
    int d = 0;
    for (int v : e) d += v;
    return d;
}

inline Series series_mult(const Series& a, const Series& b, int dims, int order) {
    Series out;
    for (const auto& [ea, ca] : a) {
        int da = series_degree(ea);
        for (const auto& [eb, cb] : b) {
            if (da + series_degree(eb) > order) continue;
            std::vector<int> e(dims);
            for (int i = 0; i < dims; ++i) e[i] = ea[i] + eb[i];
            Rat& slot = out[e];
            slot += ca * cb;
            if (slot == 0) out.erase(e);
        }
    }
    return out;
}

/// f with the x-variables recentered at the base point: returns g with
/// g(u, y) = f(x0 + u, y), exactly.
inline PolyXY recenter_x(const PolyXY& f, const std::vector<Rat>& x0) {
    const int dims = f.dims();
    PolyXY out(dims);
    for (const auto& [m, c] : f.terms()) {
        PolyXY term = PolyXY::constant(dims, c);
        XYMono ypart{std::vector<int>(dims, 0), m.y};
        PolyXY ypoly(dims);
        ypoly.add_term(std::move(ypart), 1);
        term = term * ypoly;
        for (int i = 0; i < dims; ++i) {
            PolyXY shifted = PolyXY::x_var(dims, i + 1) + PolyXY::constant(dims, x0[i]);
            for (int k = 0; k < m.x[i]; ++k) term = term * shifted;
        }
        out += term;
    }
    return out;
}

}  // namespace detail

/// Taylor coefficients b_I of the implicit solution y(x) around the base
/// point, exact to total degree `order`; y_I = I! b_I.  Solved degree by
/// degree: once all coefficients below degree d are known, the degree-d
/// slice of f(x, y(x)) = 0 is linear in the unknown layer with slope f_y.
inline std::map<Multiset, Rat> series_implicit(const PolySystem& p, int order) {
    if (order < 0) throw std::invalid_argument("series_implicit: negative order");
    const int dims = p.dims;
    const PolyXY g = detail::recenter_x(p.f, p.x0);
    const Rat fy0 = p.f.dy().eval(p.x0, p.y0);

    detail::Series w;
    w[std::vector<int>(dims, 0)] = p.y0;
    for (int d = 1; d <= order; ++d) {
        // compose g(u, w(u)) keeping terms of degree <= d
        int max_y = 0;
        for (const auto& [m, c] : g.terms()) max_y = std::max(max_y, m.y);
        std::vector<detail::Series> wpow(max_y + 1);
        wpow[0][std::vector<int>(dims, 0)] = 1;
        for (int e = 1; e <= max_y; ++e)
            wpow[e] = detail::series_mult(wpow[e - 1], w, dims, d);
        detail::Series value;
        for (const auto& [m, c] : g.terms()) {
            int base_deg = detail::series_degree(m.x);
            if (base_deg > d) continue;
            for (const auto& [e, coeff] : wpow[m.y]) {
                if (base_deg + detail::series_degree(e) > d) continue;
                std::vector<int> key(dims);
                for (int i = 0; i < dims; ++i) key[i] = m.x[i] + e[i];
                Rat& slot = value[key];
                slot += c * coeff;
                if (slot == 0) value.erase(key);
            }
        }
        // the degree-d slice must vanish; solve for the new layer
        for (const auto& [e, c] : value) {
            if (detail::series_degree(e) != d) continue;
            w[e] = -c / fy0;
        }
    }

    std::map<Multiset, Rat> out;
    for (const auto& [e, c] : w) out.emplace(Multiset::from_counts(e), c);
    return out;
}

}  // namespace ideriv

#endif
