#ifndef IDERIV_MULTISET_HPP
#define IDERIV_MULTISET_HPP

// Multisets over the index range {1..N} stored as multiplicity vectors, plus
// the combinatorial helpers built on them (generalized binomials, factorials,
// submultiset enumeration).  A derivative order like y_{112} is the multiset
// {1,1,2}; everything downstream keys off this type.

#include "ideriv/numeric.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace ideriv {

class Multiset {
public:
    Multiset() : counts_(0) {}

    explicit Multiset(int dims) : counts_(check_dims(dims)) {}

    Multiset(int dims, std::initializer_list<int> indices) : counts_(check_dims(dims)) {
        for (int i : indices) bump(i, +1);
    }

    static Multiset from_counts(std::vector<int> counts) {
        Multiset m;
        for (int c : counts)
            if (c < 0) throw std::invalid_argument("Multiset: negative multiplicity");
        m.counts_ = std::move(counts);
        return m;
    }

    int dims() const { return static_cast<int>(counts_.size()); }

    /// Multiplicity of index i (1-based).
    int count(int i) const {
        check_index(i);
        return counts_[i - 1];
    }

    /// Total number of elements counted with multiplicity.
    int size() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }

    bool empty() const { return size() == 0; }

    bool is_set() const {
        return std::all_of(counts_.begin(), counts_.end(), [](int c) { return c <= 1; });
    }

    const std::vector<int>& counts() const { return counts_; }

    /// Elements listed in increasing order with multiplicity, e.g. {1,1,3}.
    std::vector<int> elements() const {
        std::vector<int> out;
        for (int i = 1; i <= dims(); ++i)
            for (int c = 0; c < counts_[i - 1]; ++c) out.push_back(i);
        return out;
    }

    Multiset plus(int i) const {
        Multiset m = *this;
        m.bump(i, +1);
        return m;
    }

    Multiset minus(int i) const {
        Multiset m = *this;
        if (count(i) == 0)
            throw std::invalid_argument("Multiset::minus: index " + std::to_string(i) + " not present");
        m.bump(i, -1);
        return m;
    }

    bool contains(const Multiset& k) const {
        check_same_dims(k);
        for (int i = 0; i < dims(); ++i)
            if (k.counts_[i] > counts_[i]) return false;
        return true;
    }

    friend Multiset operator+(const Multiset& a, const Multiset& b) {
        a.check_same_dims(b);
        Multiset m = a;
        for (int i = 0; i < a.dims(); ++i) m.counts_[i] += b.counts_[i];
        return m;
    }

    friend Multiset operator-(const Multiset& a, const Multiset& b) {
        if (!a.contains(b)) throw std::invalid_argument("Multiset: difference of non-contained multiset");
        Multiset m = a;
        for (int i = 0; i < a.dims(); ++i) m.counts_[i] -= b.counts_[i];
        return m;
    }

    friend bool operator==(const Multiset& a, const Multiset& b) {
        return a.counts_ == b.counts_;
    }
    friend bool operator!=(const Multiset& a, const Multiset& b) { return !(a == b); }

    /// Canonical order: by size first, then multiplicity vectors lexicographically.
    friend bool operator<(const Multiset& a, const Multiset& b) {
        if (a.dims() != b.dims()) return a.dims() < b.dims();
        int sa = a.size(), sb = b.size();
        if (sa != sb) return sa < sb;
        return a.counts_ < b.counts_;
    }

private:
    static int check_dims(int dims) {
        if (dims < 0) throw std::invalid_argument("Multiset: negative dimension count");
        return dims;
    }
    void check_index(int i) const {
        if (i < 1 || i > dims())
            throw std::invalid_argument("Multiset: index " + std::to_string(i) + " out of range 1.." +
                                        std::to_string(dims()));
    }
    void check_same_dims(const Multiset& other) const {
        if (dims() != other.dims())
            throw std::invalid_argument("Multiset: dimension mismatch (" + std::to_string(dims()) +
                                        " vs " + std::to_string(other.dims()) + ")");
    }
    void bump(int i, int delta) {
        check_index(i);
        counts_[i - 1] += delta;
    }

    std::vector<int> counts_;
};

/// Product of the multiplicity factorials, prod_i nu_i!.
inline Int mfact(const Multiset& j) {
    Int r = 1;
    for (int c : j.counts()) r *= factorial(c);
    return r;
}

/// Generalized binomial prod_i C(eta_i, kappa_i); vanishes unless K is a
/// submultiset of J.
inline Int mbinom(const Multiset& j, const Multiset& k) {
    if (!j.contains(k)) return 0;
    Int r = 1;
    for (int i = 1; i <= j.dims(); ++i) r *= binomial(j.count(i), k.count(i));
    return r;
}

/// t! / (kappa_1! ... kappa_N! (t - |K|)!); vanishes unless t >= |K|.
inline Int tbinom(int t, const Multiset& k) {
    int sz = k.size();
    if (t < sz) return 0;
    Int r = factorial(t) / factorial(t - sz);
    for (int c : k.counts()) r = exact_div(r, factorial(c));
    return r;
}

/// All submultisets of J (including the empty one and J itself), in canonical
/// order.  There are prod_i (nu_i + 1) of them.
inline std::vector<Multiset> submultisets(const Multiset& j) {
    std::vector<Multiset> out;
    std::vector<int> cur(j.dims(), 0);
    for (;;) {
        out.push_back(Multiset::from_counts(cur));
        int pos = 0;
        while (pos < j.dims() && cur[pos] == j.counts()[pos]) cur[pos++] = 0;
        if (pos == j.dims()) break;
        ++cur[pos];
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Comma notation, "1,1,3"; the empty multiset renders as "-".
inline std::string multiset_text(const Multiset& m) {
    if (m.empty()) return "-";
    std::string s;
    for (int i : m.elements()) {
        if (!s.empty()) s += ',';
        s += std::to_string(i);
    }
    return s;
}

/// Exponent notation, "x1^2 x3"; the empty multiset renders as "-".
inline std::string multiset_exponent_text(const Multiset& m) {
    if (m.empty()) return "-";
    std::string s;
    for (int i = 1; i <= m.dims(); ++i) {
        int c = m.count(i);
        if (c == 0) continue;
        if (!s.empty()) s += ' ';
        s += "x" + std::to_string(i);
        if (c > 1) s += "^" + std::to_string(c);
    }
    return s;
}

/// Parses either notation produced above.  "-" and "" denote the empty
/// multiset.  Indices must lie in 1..dims.
inline Multiset parse_multiset(const std::string& text, int dims) {
    Multiset m(dims);
    if (text.empty() || text == "-") return m;
    auto fail = [&]() -> Multiset {
        throw std::invalid_argument("parse_multiset: malformed multiset '" + text + "'");
    };
    if (text.find('x') != std::string::npos) {
        std::istringstream in(text);
        std::string tok;
        while (in >> tok) {
            if (tok[0] != 'x') return fail();
            auto caret = tok.find('^');
            std::string idx = tok.substr(1, caret == std::string::npos ? caret : caret - 1);
            int exp = 1;
            if (caret != std::string::npos) {
                std::string e = tok.substr(caret + 1);
                if (e.empty() || e.find_first_not_of("0123456789") != std::string::npos) return fail();
                exp = std::atoi(e.c_str());
            }
            if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos) return fail();
            int i = std::atoi(idx.c_str());
            if (exp < 1) return fail();
            for (int c = 0; c < exp; ++c) m = m.plus(i);
        }
        return m;
    }
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) return fail();
        m = m.plus(std::atoi(tok.c_str()));
    }
    return m;
}

/// Index multiset paired with a pure-y derivative order: the building block
/// [J; r].  Ordered by total weight |J|+r, then r, then J.
struct PartVec {
    Multiset J;
    int r = 0;

    int weight() const { return J.size() + r; }

    friend bool operator==(const PartVec& a, const PartVec& b) { return a.r == b.r && a.J == b.J; }
    friend bool operator!=(const PartVec& a, const PartVec& b) { return !(a == b); }
    friend bool operator<(const PartVec& a, const PartVec& b) {
        if (a.weight() != b.weight()) return a.weight() < b.weight();
        if (a.r != b.r) return a.r < b.r;
        return a.J < b.J;
    }
};

/// "[1,1,3;2]" style rendering of a PartVec.
inline std::string part_text(const PartVec& p) {
    return "[" + multiset_text(p.J) + ";" + std::to_string(p.r) + "]";
}

/// Applies a permutation of {1..N} to the indices; sigma[i-1] is the image
/// of index i.
inline Multiset permuted(const Multiset& m, const std::vector<int>& sigma) {
    if (static_cast<int>(sigma.size()) != m.dims())
        throw std::invalid_argument("permuted: permutation size mismatch");
    std::vector<int> counts(m.dims(), 0);
    for (int i = 1; i <= m.dims(); ++i) {
        int target = sigma[i - 1];
        if (target < 1 || target > m.dims()) throw std::invalid_argument("permuted: image out of range");
        counts[target - 1] += m.count(i);
    }
    return Multiset::from_counts(counts);
}

/// All multisets over {1..dims} with the given size, in canonical order.
inline std::vector<Multiset> multisets_of_size(int dims, int size) {
    if (dims < 1 || size < 0) throw std::invalid_argument("multisets_of_size: bad arguments");
    std::vector<Multiset> out;
    std::vector<int> cur(dims, 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == dims - 1) {
            cur[pos] = left;
            out.push_back(Multiset::from_counts(cur));
            return;
        }
        for (int c = 0; c <= left; ++c) {
            cur[pos] = c;
            self(self, pos + 1, left - c);
        }
    };
    rec(rec, 0, size);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ideriv

#endif  // IDERIV_MULTISET_HPP
