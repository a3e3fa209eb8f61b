#ifndef IDERIV_FORMULA_IO_HPP
#define IDERIV_FORMULA_IO_HPP

// Structured (JSON) serialization of formulas.  A formula is stored as an
// array of term objects
//
//   {"coefficient": "p/q", "fy_power": n, "factors": [...]}
//
// where each factor object carries the index multiset in text form, the
// y-derivative order, and the exponent.  Raw-symbol factors use the keys
// "H"/"t", difference-symbol factors use "J"/"r"; exponents are >= 1 and
// coefficients nonzero, so a formula has exactly one serialized image and
// parsing it back is lossless.

#include "ideriv/formula.hpp"

#include <json.hpp>

#include <string>
#include <utility>

namespace ideriv {

namespace detail {

template <class Sym>
nlohmann::json structured_terms(const Formula<Sym>& f, const char* idx_key, const char* ord_key,
                                const Multiset& (*index_of)(const Sym&), int (*order_of)(const Sym&)) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [mono, coeff] : f.terms()) {
        nlohmann::json factors = nlohmann::json::array();
        for (const auto& [sym, exp] : mono.factors) {
            nlohmann::json fac;
            fac[idx_key] = multiset_text(index_of(sym));
            fac[ord_key] = order_of(sym);
            fac["exp"] = exp;
            factors.push_back(std::move(fac));
        }
        nlohmann::json term;
        term["coefficient"] = rat_text(coeff);
        term["fy_power"] = mono.fy_power;
        term["factors"] = std::move(factors);
        out.push_back(std::move(term));
    }
    return out;
}

template <class Sym, class Make>
Formula<Sym> formula_from_structured(const nlohmann::json& j, int dims, const char* idx_key,
                                     const char* ord_key, Make make) {
    if (!j.is_array()) throw std::invalid_argument("formula: expected a JSON array of terms");
    Formula<Sym> out;
    try {
        for (const auto& term : j) {
            if (!term.is_object() || term.size() != 3 || !term.contains("coefficient") ||
                !term.contains("fy_power") || !term.contains("factors"))
                throw std::invalid_argument(
                    "formula: term must carry exactly coefficient, fy_power, factors");
            Rat coeff = parse_rat(term["coefficient"].get<std::string>());
            if (coeff == 0) throw std::invalid_argument("formula: zero coefficient");
            Monomial<Sym> m;
            m.fy_power = term["fy_power"].get<int>();
            if (!term["factors"].is_array())
                throw std::invalid_argument("formula: factors must be an array");
            for (const auto& fac : term["factors"]) {
                if (!fac.is_object() || fac.size() != 3 || !fac.contains(idx_key) ||
                    !fac.contains(ord_key) || !fac.contains("exp"))
                    throw std::invalid_argument(std::string("formula: factor must carry exactly ") +
                                                idx_key + ", " + ord_key + ", exp");
                int exp = fac["exp"].get<int>();
                if (exp < 1) throw std::invalid_argument("formula: factor exponent must be >= 1");
                int order = fac[ord_key].get<int>();
                if (order < 0) throw std::invalid_argument("formula: negative derivative order");
                m.factors.push_back(
                    {make(parse_multiset(fac[idx_key].get<std::string>(), dims), order), exp});
            }
            out.add(std::move(m), std::move(coeff));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("formula: malformed JSON term: ") + e.what());
    }
    return out;
}

}  // namespace detail

inline nlohmann::json structured_json(const RawFormula& f) {
    return detail::structured_terms<RawSymbol>(
        f, "H", "t", [](const RawSymbol& s) -> const Multiset& { return s.H; },
        [](const RawSymbol& s) { return s.t; });
}

inline nlohmann::json structured_json(const DeltaFormula& f) {
    return detail::structured_terms<DeltaSymbol>(
        f, "J", "r", [](const DeltaSymbol& s) -> const Multiset& { return s.J; },
        [](const DeltaSymbol& s) { return s.r; });
}

inline RawFormula raw_formula_from_json(const nlohmann::json& j, int dims) {
    return detail::formula_from_structured<RawSymbol>(
        j, dims, "H", "t", [](Multiset m, int t) { return RawSymbol{std::move(m), t}; });
}

inline DeltaFormula delta_formula_from_json(const nlohmann::json& j, int dims) {
    return detail::formula_from_structured<DeltaSymbol>(
        j, dims, "J", "r", [](Multiset m, int r) { return DeltaSymbol{std::move(m), r}; });
}

}  // namespace ideriv

#endif
