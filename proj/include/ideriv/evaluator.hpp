#ifndef IDERIV_EVALUATOR_HPP
#define IDERIV_EVALUATOR_HPP

// Numeric layer: tables of partial-derivative values f_{Hy^t} at a base
// point, exact and floating-point evaluation of the derivative formulas on
// such tables, and conversion from polynomial test problems.  Table values
// are exact rationals so the core identity checks are equality checks; the
// floating-point path converts only at the very end.

#include "ideriv/formula.hpp"
#include "ideriv/multiset.hpp"
#include "ideriv/numeric.hpp"
#include "ideriv/polysys.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ideriv {

namespace detail {

inline std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline int parse_int_strict(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected an integer, got '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
    return v;
}

inline double dpow(double base, int exp) {
    if (exp < 0) return 1.0 / dpow(base, -exp);
    double out = 1.0;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

}  // namespace detail

/// All values f_{Hy^t}(x0, y0) with |H| + t <= order.  The constructor
/// enforces completeness and the implicit-function hypothesis f_y != 0;
/// extra entries beyond the declared order are allowed.
class DerivTable {
public:
    using Key = std::pair<Multiset, int>;

    DerivTable(int dims, int order, std::vector<Rat> x0, Rat y0, std::map<Key, Rat> entries)
        : dims_(dims),
          order_(order),
          x0_(std::move(x0)),
          y0_(std::move(y0)),
          entries_(std::move(entries)) {
        if (dims_ < 1) throw std::invalid_argument("DerivTable: dims must be positive");
        if (order_ < 1) throw std::invalid_argument("DerivTable: order must be at least 1");
        if (static_cast<int>(x0_.size()) != dims_)
            throw std::invalid_argument("DerivTable: base point has wrong dimension");
        for (const auto& [key, v] : entries_) {
            if (key.first.dims() != dims_)
                throw std::invalid_argument("DerivTable: entry index has wrong dimension");
            if (key.second < 0) throw std::invalid_argument("DerivTable: negative y-order");
        }
        for (int s = 0; s <= order_; ++s) {
            for (const Multiset& H : multisets_of_size(dims_, s)) {
                for (int t = 0; s + t <= order_; ++t) {
                    if (!entries_.count({H, t}))
                        throw std::invalid_argument("DerivTable: missing entry H=" +
                                                    multiset_text(H) + " t=" +
                                                    std::to_string(t));
                }
            }
        }
        if (entries_.at({Multiset(dims_), 1}) == 0)
            throw std::invalid_argument("DerivTable: f_y vanishes at the base point");
    }

    int dims() const { return dims_; }
    int order() const { return order_; }
    const std::vector<Rat>& x0() const { return x0_; }
    const Rat& y0() const { return y0_; }
    const std::map<Key, Rat>& entries() const { return entries_; }

    const Rat& value(const Multiset& H, int t) const {
        auto it = entries_.find({H, t});
        if (it == entries_.end())
            throw std::invalid_argument("DerivTable: no entry H=" + multiset_text(H) +
                                        " t=" + std::to_string(t));
        return it->second;
    }
    const Rat& fy() const { return entries_.at({Multiset(dims_), 1}); }

private:
    int dims_;
    int order_;
    std::vector<Rat> x0_;
    Rat y0_;
    std::map<Key, Rat> entries_;
};

/// Exact partials of the polynomial at its base point, complete to `order`.
inline DerivTable derivtable_from_poly(const PolySystem& p, int order) {
    if (order < 1)
        throw std::invalid_argument("derivtable_from_poly: order must be at least 1");
    std::map<DerivTable::Key, Rat> entries;
    for (int s = 0; s <= order; ++s) {
        for (const Multiset& H : multisets_of_size(p.dims, s)) {
            PolyXY g = p.f;
            for (int i : H.elements()) g = g.dx(i);
            for (int t = 0; s + t <= order; ++t) {
                entries.emplace(DerivTable::Key{H, t}, g.eval(p.x0, p.y0));
                g = g.dy();
            }
        }
    }
    return DerivTable(p.dims, order, p.x0, p.y0, std::move(entries));
}

inline Rat eval_formula_exact(const RawFormula& fm, const DerivTable& tb) {
    const Rat& fy = tb.fy();
    Rat total = 0;
    for (const auto& [mono, coeff] : fm.terms()) {
        Rat prod = coeff;
        for (const auto& [sym, exp] : mono.factors)
            prod *= rat_pow(tb.value(sym.H, sym.t), exp);
        if (mono.fy_power > 0)
            prod /= rat_pow(fy, mono.fy_power);
        else if (mono.fy_power < 0)
            prod *= rat_pow(fy, -mono.fy_power);
        total += prod;
    }
    return total;
}

/// Difference-form terms are not table entries, so the formula is expanded
/// into raw partials first.  Agrees with the raw form exactly.
inline Rat eval_formula_exact(const DeltaFormula& fm, const DerivTable& tb) {
    return eval_formula_exact(expand_delta_formula(fm), tb);
}

inline double eval_formula(const RawFormula& fm, const DerivTable& tb,
                           double eps_fy = 1e-12) {
    const double fy = rat_to_double(tb.fy());
    if (std::fabs(fy) < eps_fy)
        throw std::invalid_argument("eval_formula: |f_y| is below the safety threshold");
    double total = 0.0;
    for (const auto& [mono, coeff] : fm.terms()) {
        double prod = rat_to_double(coeff);
        for (const auto& [sym, exp] : mono.factors)
            prod *= detail::dpow(rat_to_double(tb.value(sym.H, sym.t)), exp);
        total += prod * detail::dpow(fy, -mono.fy_power);
    }
    return total;
}

inline double eval_formula(const DeltaFormula& fm, const DerivTable& tb,
                           double eps_fy = 1e-12) {
    return eval_formula(expand_delta_formula(fm), tb, eps_fy);
}

/// "x1,..,xN;y" with integer, fraction, or decimal coordinates.
inline std::pair<std::vector<Rat>, Rat> parse_point(const std::string& text) {
    auto semi = text.find(';');
    if (semi == std::string::npos || text.find(';', semi + 1) != std::string::npos)
        throw std::invalid_argument("point: expected \"x1,..,xN;y\"");
    std::vector<Rat> xs;
    std::string head = text.substr(0, semi);
    std::size_t pos = 0;
    while (true) {
        auto comma = head.find(',', pos);
        std::string piece = detail::trimmed(
            head.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (piece.empty()) throw std::invalid_argument("point: empty coordinate");
        xs.push_back(parse_rat(piece));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    std::string tail = detail::trimmed(text.substr(semi + 1));
    if (tail.empty()) throw std::invalid_argument("point: empty coordinate");
    return {std::move(xs), parse_rat(tail)};
}

inline std::string point_text(const std::vector<Rat>& x0, const Rat& y0) {
    std::string out;
    for (std::size_t i = 0; i < x0.size(); ++i) {
        if (i) out += ",";
        out += rat_text(x0[i]);
    }
    out += ";";
    out += rat_text(y0);
    return out;
}

/// Text form: a dims/order/point header, then one "H=.. t=.. v=.." record
/// per entry.  '#' starts a comment; the empty index set is written "-".
inline std::string derivtable_text(const DerivTable& tb) {
    std::ostringstream out;
    out << "dims " << tb.dims() << "\n";
    out << "order " << tb.order() << "\n";
    out << "point " << point_text(tb.x0(), tb.y0()) << "\n";
    for (const auto& [key, v] : tb.entries())
        out << "H=" << multiset_text(key.first) << " t=" << key.second << " v=" << rat_text(v)
            << "\n";
    return out.str();
}

inline DerivTable parse_derivtable(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int dims = -1, order = -1;
    bool have_point = false;
    std::vector<Rat> x0;
    Rat y0;
    std::map<DerivTable::Key, Rat> entries;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fail = [&](const std::string& msg) -> void {
            throw std::invalid_argument("derivative table, line " + std::to_string(lineno) +
                                        ": " + msg);
        };
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;
        try {
            if (tok[0].rfind("H=", 0) == 0) {
                if (dims < 0 || order < 0 || !have_point)
                    fail("record before the dims/order/point header");
                if (tok.size() != 3 || tok[1].rfind("t=", 0) != 0 || tok[2].rfind("v=", 0) != 0)
                    fail("expected \"H=<indices> t=<int> v=<value>\"");
                Multiset H = parse_multiset(tok[0].substr(2), dims);
                int tv = detail::parse_int_strict(tok[1].substr(2));
                if (tv < 0) fail("negative y-order");
                Rat v = parse_rat(tok[2].substr(2));
                if (!entries.emplace(DerivTable::Key{H, tv}, v).second)
                    fail("duplicate entry for H=" + tok[0].substr(2) + " t=" +
                         std::to_string(tv));
            } else if (tok[0] == "dims") {
                if (dims >= 0) fail("duplicate dims");
                if (tok.size() != 2) fail("expected \"dims <int>\"");
                dims = detail::parse_int_strict(tok[1]);
                if (dims < 1) fail("dims must be positive");
            } else if (tok[0] == "order") {
                if (order >= 0) fail("duplicate order");
                if (tok.size() != 2) fail("expected \"order <int>\"");
                order = detail::parse_int_strict(tok[1]);
                if (order < 1) fail("order must be at least 1");
            } else if (tok[0] == "point") {
                if (have_point) fail("duplicate point");
                if (dims < 0) fail("point before dims");
                if (tok.size() != 2) fail("expected \"point x1,..,xN;y\"");
                auto [xs, y] = parse_point(tok[1]);
                if (static_cast<int>(xs.size()) != dims) fail("point has wrong dimension");
                x0 = std::move(xs);
                y0 = std::move(y);
                have_point = true;
            } else {
                fail("unknown key '" + tok[0] + "'");
            }
        } catch (const std::invalid_argument& e) {
            std::string what = e.what();
            if (what.rfind("derivative table", 0) == 0) throw;
            fail(what);
        }
    }
    if (dims < 0) throw std::invalid_argument("derivative table: missing dims header");
    if (order < 0) throw std::invalid_argument("derivative table: missing order header");
    if (!have_point) throw std::invalid_argument("derivative table: missing point header");
    return DerivTable(dims, order, std::move(x0), std::move(y0), std::move(entries));
}

inline DerivTable load_derivtable(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_derivtable(buf.str());
}

inline void save_derivtable(const DerivTable& tb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
    out << derivtable_text(tb);
}

}  // namespace ideriv

#endif
