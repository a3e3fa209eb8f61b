// Command-line front end: prints the closed-form derivative formulas and
// their coefficient/partition tables, evaluates them on polynomial test
// problems or saved derivative tables, and sweeps the formula-vs-oracle
// identities.  Exit codes: 0 success, 1 failed verification, 2 bad usage
// or malformed input.

#include "ideriv/coefficients.hpp"
#include "ideriv/evaluator.hpp"
#include "ideriv/formula.hpp"
#include "ideriv/formula_io.hpp"
#include "ideriv/multiset.hpp"
#include "ideriv/oracle.hpp"
#include "ideriv/partitions.hpp"
#include "ideriv/polysys.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ideriv;

Multiset parse_order(const std::string& text, int dims) {
    Multiset I = parse_multiset(text, dims);
    if (I.empty())
        throw std::invalid_argument("the empty multi-index has no derivative; give --order "
                                    "at least one index");
    return I;
}

RenderStyle style_of(const std::string& name) {
    return name == "latex" ? RenderStyle::latex : RenderStyle::plain;
}

RawFormula formula_as_raw(const Multiset& I, const std::string& form) {
    if (form == "delta") return expand_delta_formula(delta_formula(I));
    if (form == "fizero") return fi_zero_formula(I);
    return raw_formula(I);
}

// smallest table order that covers every factor of the formula
int needed_order(const RawFormula& f) {
    int needed = 1;
    for (const auto& [mono, coeff] : f.terms())
        for (const auto& [sym, exp] : mono.factors)
            needed = std::max(needed, sym.H.size() + sym.t);
    return needed;
}

struct FormulaArgs {
    int dims = 0;
    std::string order;
    std::string form = "raw";
    std::string render = "plain";
};

int run_formula(const FormulaArgs& a) {
    Multiset I = parse_order(a.order, a.dims);
    if (a.form == "delta") {
        DeltaFormula f = delta_formula(I);
        if (a.render == "structured")
            std::cout << structured_json(f).dump(2) << "\n";
        else
            std::cout << render(f, style_of(a.render)) << "\n";
        return 0;
    }
    RawFormula f = a.form == "fizero" ? fi_zero_formula(I) : raw_formula(I);
    if (a.render == "structured")
        std::cout << structured_json(f).dump(2) << "\n";
    else
        std::cout << render(f, style_of(a.render)) << "\n";
    return 0;
}

struct CoeffsArgs {
    int dims = 0;
    std::string order;
    std::string family;
    std::string render = "plain";
};

int run_coeffs(const CoeffsArgs& a) {
    Multiset I = parse_order(a.order, a.dims);
    // rows: partition text, level (h or g), unsigned and signed coefficient
    std::vector<std::array<std::string, 4>> rows;
    nlohmann::json arr = nlohmann::json::array();
    if (a.family == "alpha") {
        for (const Alpha& al : enumerate_A(I)) {
            Int C = C_alpha(al, I), c = c_alpha(al, I);
            rows.push_back({compact_text(al), std::to_string(al.part_count()), C.str(), c.str()});
            arr.push_back({{"partition", nlohmann::json::parse(records_text(al))},
                           {"h", al.part_count()},
                           {"C", C.str()},
                           {"c", c.str()}});
        }
    } else {
        for (const Gamma& gm : enumerate_B(I)) {
            Int D = D_gamma(gm, I), d = d_gamma(gm, I);
            rows.push_back({compact_text(gm), std::to_string(gm.part_count()), D.str(), d.str()});
            arr.push_back({{"partition", nlohmann::json::parse(records_text(gm))},
                           {"g", gm.part_count()},
                           {"D", D.str()},
                           {"d", d.str()}});
        }
    }
    if (a.render == "structured") {
        std::cout << arr.dump(2) << "\n";
        return 0;
    }
    std::array<std::string, 4> head = a.family == "alpha"
                                          ? std::array<std::string, 4>{"partition", "h", "C", "c"}
                                          : std::array<std::string, 4>{"partition", "g", "D", "d"};
    std::array<std::size_t, 4> width{};
    for (int col = 0; col < 4; ++col) {
        width[col] = head[col].size();
        for (const auto& row : rows) width[col] = std::max(width[col], row[col].size());
    }
    auto line = [&](const std::array<std::string, 4>& row) {
        std::cout << std::left << std::setw(static_cast<int>(width[0])) << row[0];
        for (int col = 1; col < 4; ++col)
            std::cout << "  " << std::right << std::setw(static_cast<int>(width[col])) << row[col];
        std::cout << "\n";
    };
    line(head);
    for (const auto& row : rows) line(row);
    return 0;
}

struct EnumerateArgs {
    int dims = 0;
    std::string order;
    std::string family;
    int level = -1;
};

int run_enumerate(const EnumerateArgs& a) {
    Multiset I = parse_order(a.order, a.dims);
    if (a.level != -1 && a.level < 1)
        throw std::invalid_argument("--level must be at least 1");
    if (a.family == "alpha") {
        auto list = a.level < 0 ? enumerate_A(I) : enumerate_A_h(I, a.level);
        for (const Alpha& al : list) std::cout << compact_text(al) << "\n";
    } else {
        auto list = a.level < 0 ? enumerate_B(I) : enumerate_B_g(I, a.level);
        for (const Gamma& gm : list) std::cout << compact_text(gm) << "\n";
    }
    return 0;
}

struct EvalArgs {
    std::string poly;
    std::string point;
    std::string table;
    std::string order;
    std::string form = "raw";
    std::string mode = "float";
    double eps_fy = 1e-12;
};

int run_eval(const EvalArgs& a) {
    std::optional<DerivTable> tb;
    std::optional<PolySystem> p;
    int dims = 0;
    if (!a.table.empty()) {
        if (!a.poly.empty() || !a.point.empty())
            throw std::invalid_argument("--table cannot be combined with --poly/--point");
        tb.emplace(load_derivtable(a.table));
        dims = tb->dims();
    } else {
        if (a.poly.empty() || a.point.empty())
            throw std::invalid_argument("give either --poly with --point, or --table");
        auto [x0, y0] = parse_point(a.point);
        dims = static_cast<int>(x0.size());
        p.emplace(parse_polyxy(a.poly, dims), std::move(x0), std::move(y0));
    }
    Multiset I = parse_order(a.order, dims);
    RawFormula f = formula_as_raw(I, a.form);
    if (!tb) tb.emplace(derivtable_from_poly(*p, needed_order(f)));
    if (a.mode == "exact") {
        std::cout << rat_text(eval_formula_exact(f, *tb)) << "\n";
    } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", eval_formula(f, *tb, a.eps_fy));
        std::cout << buf << "\n";
    }
    return 0;
}

struct VerifyArgs {
    int max_order = 0;
    int dims = 0;
};

int run_verify(const VerifyArgs& a) {
    using clock = std::chrono::steady_clock;
    std::vector<Multiset> todo;
    std::size_t width = 1;
    for (int size = 1; size <= a.max_order; ++size)
        for (const Multiset& I : multisets_of_size(a.dims, size)) {
            todo.push_back(I);
            width = std::max(width, multiset_text(I).size());
        }
    int failures = 0;
    for (const Multiset& I : todo) {
        auto t0 = clock::now();
        bool ok_raw = ratfunc_of(raw_formula(I), a.dims) == oracle_yI(I);
        bool ok_delta = I.size() < 2 || expand_and_compare(I);
        bool ok_grad =
            I.size() < 2 || fi_zero_formula(I) == drop_singleton_monomials(raw_formula(I));
        double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        bool ok = ok_raw && ok_delta && ok_grad;
        if (!ok) ++failures;
        std::cout << (ok ? "ok   " : "FAIL ") << "I=" << std::left
                  << std::setw(static_cast<int>(width)) << multiset_text(I) << std::right << "  ";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%8.2f ms", ms);
        std::cout << buf;
        if (!ok) {
            std::cout << "  (";
            bool first = true;
            for (const auto& [bad, name] :
                 {std::pair{!ok_raw, "raw=oracle"}, {!ok_delta, "delta=raw"},
                  {!ok_grad, "gradient-free"}}) {
                if (!bad) continue;
                if (!first) std::cout << ", ";
                first = false;
                std::cout << name;
            }
            std::cout << ")";
        }
        std::cout << "\n";
    }
    std::cout << "checked " << todo.size() << " multi-indices, dims " << a.dims
              << ", max order " << a.max_order << "\n";
    if (failures == 0) {
        std::cout << "all identities hold\n";
        return 0;
    }
    std::cout << failures << " multi-indices failed\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"implicit-function derivatives: closed formulas, coefficient tables, "
                 "numeric evaluation, and identity checks"};
    app.require_subcommand(1);

    FormulaArgs fa;
    CLI::App* cmd_formula =
        app.add_subcommand("formula", "print the derivative formula for a multi-index");
    cmd_formula->add_option("--dims", fa.dims, "number of x variables")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_formula->add_option("--order", fa.order, "multi-index I, e.g. 1,1,3")->required();
    cmd_formula->add_option("--form", fa.form, "formula flavor")
        ->check(CLI::IsMember({"delta", "raw", "fizero"}))
        ->capture_default_str();
    cmd_formula->add_option("--render", fa.render, "output style")
        ->check(CLI::IsMember({"plain", "latex", "structured"}))
        ->capture_default_str();

    CoeffsArgs ca;
    CLI::App* cmd_coeffs =
        app.add_subcommand("coeffs", "tabulate partitions with their coefficients");
    cmd_coeffs->add_option("--dims", ca.dims, "number of x variables")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_coeffs->add_option("--order", ca.order, "multi-index I")->required();
    cmd_coeffs->add_option("--family", ca.family, "partition family")
        ->required()
        ->check(CLI::IsMember({"alpha", "gamma"}));
    cmd_coeffs->add_option("--render", ca.render, "output style")
        ->check(CLI::IsMember({"plain", "structured"}))
        ->capture_default_str();

    EnumerateArgs ea;
    CLI::App* cmd_enumerate =
        app.add_subcommand("enumerate", "list the partitions behind a formula");
    cmd_enumerate->add_option("--dims", ea.dims, "number of x variables")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_enumerate->add_option("--order", ea.order, "multi-index I")->required();
    cmd_enumerate->add_option("--family", ea.family, "partition family")
        ->required()
        ->check(CLI::IsMember({"alpha", "gamma"}));
    cmd_enumerate->add_option("--level", ea.level,
                              "restrict to one part count (h for alpha, g for gamma)");

    EvalArgs va;
    CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a derivative numerically");
    cmd_eval->add_option("--poly", va.poly, "polynomial in x1..xN and y, e.g. \"y^2+x1-1\"");
    cmd_eval->add_option("--point", va.point, "base point \"x1,..,xN;y\"");
    cmd_eval->add_option("--table", va.table, "derivative table file");
    cmd_eval->add_option("--order", va.order, "multi-index I")->required();
    cmd_eval->add_option("--form", va.form, "formula flavor")
        ->check(CLI::IsMember({"delta", "raw", "fizero"}))
        ->capture_default_str();
    cmd_eval->add_option("--mode", va.mode, "arithmetic")
        ->check(CLI::IsMember({"float", "exact"}))
        ->capture_default_str();
    cmd_eval->add_option("--eps-fy", va.eps_fy, "minimum |f_y| for floating-point evaluation")
        ->capture_default_str();

    VerifyArgs ya;
    CLI::App* cmd_verify =
        app.add_subcommand("verify", "sweep the formula-vs-oracle identities");
    cmd_verify->add_option("--max-order", ya.max_order, "largest |I| to check")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_verify->add_option("--dims", ya.dims, "number of x variables")
        ->required()
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_formula->parsed()) return run_formula(fa);
        if (cmd_coeffs->parsed()) return run_coeffs(ca);
        if (cmd_enumerate->parsed()) return run_enumerate(ea);
        if (cmd_eval->parsed()) return run_eval(va);
        return run_verify(ya);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
