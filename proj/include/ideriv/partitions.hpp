#ifndef IDERIV_PARTITIONS_HPP
#define IDERIV_PARTITIONS_HPP

// Constrained multiset partitions.  An implicit derivative of order I is a sum
// over "partitions" of I into parts [J;r]: multiplicity functions m on PartVec
// keys subject to
//     sum m_{J,r} * J = I      and      sum (r-1) * m_{J,r} = -1.
// Two key families matter: Alpha (every part has |J|+r >= 2, feeding the
// difference-form expansion) and Gamma (parts of weight >= 1 without pure-y
// parts of order < 2, feeding the fully expanded form).  Both are enumerated
// by a pruned backtracking search over candidate parts.

#include "ideriv/multiset.hpp"

#include <utility>

namespace ideriv {

namespace detail {

/// Sparse multiplicity function over PartVec keys; the Policy decides which
/// keys are admissible.  Entries are kept sorted with positive multiplicity,
/// so equality of values is equality of representations.
template <class Policy>
class PartitionMap {
public:
    using Entry = std::pair<PartVec, int>;

    PartitionMap() = default;

    PartitionMap(int dims, std::vector<Entry> entries) : dims_(dims) {
        std::sort(entries.begin(), entries.end());
        for (auto& e : entries) {
            if (e.first.J.dims() != dims)
                throw std::invalid_argument(std::string(Policy::name()) + ": key dimension mismatch");
            if (e.second <= 0)
                throw std::invalid_argument(std::string(Policy::name()) + ": non-positive multiplicity");
            if (!Policy::key_ok(e.first))
                throw std::invalid_argument(std::string(Policy::name()) + ": inadmissible part " +
                                            part_text(e.first));
            if (!entries_.empty() && entries_.back().first == e.first)
                entries_.back().second += e.second;
            else
                entries_.push_back(e);
        }
    }

    int dims() const { return dims_; }
    const std::vector<Entry>& entries() const { return entries_; }

    int multiplicity(const PartVec& key) const {
        for (const auto& e : entries_)
            if (e.first == key) return e.second;
        return 0;
    }

    /// Number of parts counted with multiplicity (h for Alpha, g for Gamma).
    int part_count() const {
        int c = 0;
        for (const auto& e : entries_) c += e.second;
        return c;
    }

    /// Total pure-y derivative order, sum r * m.
    int ydegree() const {
        int c = 0;
        for (const auto& e : entries_) c += e.first.r * e.second;
        return c;
    }

    /// Combined index multiset, sum m * J.
    Multiset index_sum() const {
        Multiset total(dims_);
        for (const auto& e : entries_)
            for (int k = 0; k < e.second; ++k) total = total + e.first.J;
        return total;
    }

    /// Copy with the multiplicity of `key` shifted by `delta` (entries dropped
    /// at zero).  Used to walk between neighbouring partitions.
    PartitionMap adjusted(const PartVec& key, int delta) const {
        PartitionMap out = *this;
        for (auto it = out.entries_.begin(); it != out.entries_.end(); ++it) {
            if (it->first == key) {
                it->second += delta;
                if (it->second < 0)
                    throw std::invalid_argument(std::string(Policy::name()) +
                                                ": adjustment below zero at " + part_text(key));
                if (it->second == 0) out.entries_.erase(it);
                return out;
            }
        }
        if (delta < 0)
            throw std::invalid_argument(std::string(Policy::name()) + ": adjustment below zero at " +
                                        part_text(key));
        if (delta == 0) return out;
        if (!Policy::key_ok(key))
            throw std::invalid_argument(std::string(Policy::name()) + ": inadmissible part " +
                                        part_text(key));
        auto pos = std::lower_bound(out.entries_.begin(), out.entries_.end(), key,
                                    [](const Entry& e, const PartVec& k) { return e.first < k; });
        out.entries_.insert(pos, {key, delta});
        return out;
    }

    friend bool operator==(const PartitionMap& a, const PartitionMap& b) {
        return a.dims_ == b.dims_ && a.entries_ == b.entries_;
    }
    friend bool operator!=(const PartitionMap& a, const PartitionMap& b) { return !(a == b); }
    friend bool operator<(const PartitionMap& a, const PartitionMap& b) {
        if (a.dims_ != b.dims_) return a.dims_ < b.dims_;
        return a.entries_ < b.entries_;
    }

private:
    int dims_ = 0;
    std::vector<Entry> entries_;
};

}  // namespace detail

struct AlphaPolicy {
    static const char* name() { return "Alpha"; }
    static bool key_ok(const PartVec& p) { return p.weight() >= 2; }
};

struct GammaPolicy {
    static const char* name() { return "Gamma"; }
    static bool key_ok(const PartVec& p) { return p.weight() >= 1 && !(p.J.empty() && p.r <= 1); }
};

using Alpha = detail::PartitionMap<AlphaPolicy>;
using Gamma = detail::PartitionMap<GammaPolicy>;

/// True iff the multiplicity function decomposes I, i.e. both defining
/// constraints hold (the admissibility of keys is structural).
template <class P>
bool is_partition_of(const detail::PartitionMap<P>& a, const Multiset& I) {
    return a.dims() == I.dims() && a.index_sum() == I && a.ydegree() - a.part_count() == -1;
}

/// Alpha together with the bookkeeping multiplicity of the part [-;1]; in
/// this guise the value is an honest partition of the extended multiset
/// "I with |I|-2 extra y-slots" into exactly |I|-1 parts.
struct TildeAlpha {
    Alpha base;
    int m_empty1 = 0;
};

namespace detail {

/// Backtracking core shared by the Alpha and Gamma enumerations.  Candidates
/// come sorted in descending canonical order; parts are picked with
/// non-increasing candidate index, so every multiplicity function is reached
/// exactly once.  `min_lower_cost` is the least index budget a deficit
/// lowering part can consume (2 for Alpha, 1 for Gamma), which powers the
/// main prune.
inline void partition_search(const std::vector<PartVec>& cands, std::size_t from,
                             const Multiset& budget, int deficit, int min_lower_cost,
                             std::vector<PartVec>& picked,
                             std::vector<std::vector<PartVec>>& out) {
    if (budget.empty() && deficit == -1) {
        out.push_back(picked);
        return;  // any continuation would need budget to re-lower the deficit
    }
    if (deficit - budget.size() / min_lower_cost > -1) return;
    for (std::size_t i = from; i < cands.size(); ++i) {
        const PartVec& p = cands[i];
        if (!budget.contains(p.J)) continue;
        picked.push_back(p);
        partition_search(cands, i, budget - p.J, deficit + p.r - 1, min_lower_cost, picked, out);
        picked.pop_back();
    }
}

template <class Partition>
std::vector<Partition> run_partition_search(const Multiset& I, std::vector<PartVec> cands,
                                            int min_lower_cost) {
    std::sort(cands.begin(), cands.end(), [](const PartVec& a, const PartVec& b) { return b < a; });
    std::vector<std::vector<PartVec>> raw;
    std::vector<PartVec> picked;
    partition_search(cands, 0, I, 0, min_lower_cost, picked, raw);
    std::vector<Partition> out;
    out.reserve(raw.size());
    for (auto& parts : raw) {
        std::vector<typename Partition::Entry> entries;
        for (const auto& p : parts) {
            if (!entries.empty() && entries.back().first == p)
                ++entries.back().second;
            else
                entries.push_back({p, 1});
        }
        out.push_back(Partition(I.dims(), std::move(entries)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// All Alphas decomposing I, canonically ordered.
inline std::vector<Alpha> enumerate_A(const Multiset& I) {
    if (I.size() < 2) throw std::invalid_argument("enumerate_A: |I| must be at least 2");
    std::vector<PartVec> cands;
    int rmax = I.size() - 2;
    for (const auto& J : submultisets(I))
        for (int r = 0; r <= rmax; ++r)
            if (J.size() + r >= 2) cands.push_back({J, r});
    return detail::run_partition_search<Alpha>(I, std::move(cands), 2);
}

/// The Alphas for I with exactly h parts.
inline std::vector<Alpha> enumerate_A_h(const Multiset& I, int h) {
    if (h < 1 || h > I.size() - 1)
        throw std::invalid_argument("enumerate_A_h: h out of range 1..|I|-1");
    std::vector<Alpha> out;
    for (auto& a : enumerate_A(I))
        if (a.part_count() == h) out.push_back(std::move(a));
    return out;
}

/// All Gammas decomposing I, canonically ordered.
inline std::vector<Gamma> enumerate_B(const Multiset& I) {
    if (I.size() < 1) throw std::invalid_argument("enumerate_B: |I| must be at least 1");
    std::vector<PartVec> cands;
    int tmax = 2 * I.size() - 2;
    for (const auto& H : submultisets(I))
        for (int t = 0; t <= tmax; ++t)
            if (GammaPolicy::key_ok({H, t})) cands.push_back({H, t});
    return detail::run_partition_search<Gamma>(I, std::move(cands), 1);
}

/// The Gammas for I with exactly g parts.
inline std::vector<Gamma> enumerate_B_g(const Multiset& I, int g) {
    if (g < 1 || g > 2 * I.size() - 1)
        throw std::invalid_argument("enumerate_B_g: g out of range 1..2|I|-1");
    std::vector<Gamma> out;
    for (auto& s : enumerate_B(I))
        if (s.part_count() == g) out.push_back(std::move(s));
    return out;
}

/// Attaches the implied [-;1] multiplicity, turning a into a partition of the
/// y-extended multiset into exactly |I|-1 parts.
inline TildeAlpha to_tilde(const Alpha& a, const Multiset& I) {
    if (!is_partition_of(a, I)) throw std::invalid_argument("to_tilde: value does not decompose I");
    return TildeAlpha{a, (I.size() - 1) - a.part_count()};
}

/// Drops the bookkeeping multiplicity again; inverse of to_tilde.
inline Alpha from_tilde(const TildeAlpha& ta) {
    if (ta.m_empty1 < 0) throw std::invalid_argument("from_tilde: negative bookkeeping multiplicity");
    return ta.base;
}

/// Alphas embed into the Gamma family unchanged (their keys are a subset of
/// the admissible Gamma keys).
inline Gamma as_gamma(const Alpha& a) {
    std::vector<Gamma::Entry> entries(a.entries().begin(), a.entries().end());
    return Gamma(a.dims(), std::move(entries));
}

/// Applies an index permutation to every part.
template <class P>
detail::PartitionMap<P> permuted(const detail::PartitionMap<P>& a, const std::vector<int>& sigma) {
    std::vector<typename detail::PartitionMap<P>::Entry> entries;
    for (const auto& e : a.entries())
        entries.push_back({PartVec{permuted(e.first.J, sigma), e.first.r}, e.second});
    return detail::PartitionMap<P>(a.dims(), std::move(entries));
}

/// Compact one-line rendering, e.g. "[1,2;0][1;1]^2".
template <class P>
std::string compact_text(const detail::PartitionMap<P>& a) {
    if (a.entries().empty()) return "[]";
    std::string s;
    for (const auto& e : a.entries()) {
        s += part_text(e.first);
        if (e.second > 1) s += "^" + std::to_string(e.second);
    }
    return s;
}

/// Structured one-line serialization: list of {J, r, m} records in canonical
/// key order.
template <class P>
std::string records_text(const detail::PartitionMap<P>& a) {
    std::string s = "[";
    bool first = true;
    for (const auto& e : a.entries()) {
        if (!first) s += ",";
        first = false;
        s += "{\"J\":\"" + multiset_text(e.first.J) + "\",\"r\":" + std::to_string(e.first.r) +
             ",\"m\":" + std::to_string(e.second) + "}";
    }
    return s + "]";
}

}  // namespace ideriv

#endif  // IDERIV_PARTITIONS_HPP
