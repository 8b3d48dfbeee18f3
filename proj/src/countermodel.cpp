#include "malt/countermodel.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "malt/closure.hpp"
#include "malt/error.hpp"

namespace malt {

namespace {

std::vector<std::string> collect_variables(const TermPool& pool, const EquationSystem& sys) {
    std::vector<std::string> vars;
    for (const Equation& eq : sys.equations)
        for (TermId side : {eq.lhs, eq.rhs})
            for (const std::string& v : pool.variables_in_order(side))
                if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    return vars;
}

}  // namespace

TermSearch find_term_witness(TermPool& pool, const FiniteAlgebra& A, const EquationSystem& sys,
                             std::size_t cap) {
    A.validate();
    if (sys.signature.symbols.size() != 1)
        throw Error("term witness search needs a single-symbol system");
    const std::string& symbol = sys.signature.symbols.begin()->first;
    const int arity = sys.signature.symbols.begin()->second;
    const std::vector<std::string> vars = collect_variables(pool, sys);
    const int n = A.size;

    ClosureOptions opts;
    opts.cap = cap;
    // An element of the clone slice is the value table of a candidate term;
    // install it as the sole operation of a scratch algebra and test every
    // assignment of the system's variables.
    opts.target = [&pool, &sys, &vars, &symbol, arity, n](std::span<const Elem> table) {
        FiniteAlgebra holder{n, {}};
        holder.ops.emplace(symbol, OperationTable{arity, Tuple(table.begin(), table.end())});
        Tuple assign(vars.size(), 0);
        while (true) {
            std::map<std::string, Elem> env;
            for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = assign[i];
            for (const Equation& eq : sys.equations)
                if (eval_term_at(holder, pool, eq.lhs, {}, env) !=
                    eval_term_at(holder, pool, eq.rhs, {}, env))
                    return false;
            std::size_t d = assign.size();
            while (d > 0) {
                if (++assign[d - 1] < n) break;
                assign[d - 1] = 0;
                --d;
            }
            if (d == 0) break;
        }
        return true;
    };

    const WitnessedClosure wc = term_clone_slice(A, static_cast<std::size_t>(arity), opts);

    TermSearch out;
    out.closure_size = wc.elements.size();
    if (wc.target_hit) {
        out.status = SearchStatus::Found;
        std::vector<std::string> names;
        names.reserve(static_cast<std::size_t>(arity));
        for (int i = 1; i <= arity; ++i) names.push_back("x" + std::to_string(i));
        out.witness = TermDef{names, extract_witness(pool, wc, *wc.target_hit, names)};
    } else {
        out.status = wc.complete ? SearchStatus::None : SearchStatus::Budget;
    }
    return out;
}

namespace {

struct SymbolCells {
    std::string name;
    std::vector<std::size_t> free_cells;  // row-major indices off the diagonal
};

// Idempotent tables only: every cell whose arguments all agree is pinned to
// that argument, the rest are free.
std::pair<FiniteAlgebra, std::vector<SymbolCells>> idempotent_scaffold(const Signature& sig,
                                                                       int n) {
    FiniteAlgebra A{n, {}};
    std::vector<SymbolCells> layout;
    for (const auto& [name, arity] : sig.symbols) {
        OperationTable op;
        op.arity = arity;
        op.table.assign(static_cast<std::size_t>(checked_pow(n, arity, 1ull << 22)), 0);
        SymbolCells cells{name, {}};
        Tuple args(static_cast<std::size_t>(arity), 0);
        for (std::size_t idx = 0; idx < op.table.size(); ++idx) {
            const bool constant = std::all_of(args.begin(), args.end(),
                                              [&](Elem a) { return a == args[0]; });
            if (constant)
                op.table[idx] = args[0];
            else
                cells.free_cells.push_back(idx);
            for (std::size_t j = args.size(); j-- > 0;) {
                if (++args[j] < n) break;
                args[j] = 0;
            }
        }
        A.ops.emplace(name, std::move(op));
        layout.push_back(std::move(cells));
    }
    return {std::move(A), std::move(layout)};
}

}  // namespace

CountermodelResult find_countermodel(TermPool& pool, const EquationSystem& hypotheses,
                                     const EquationSystem& goal,
                                     const CountermodelOptions& opts) {
    if (goal.signature.symbols.size() != 1)
        throw Error("countermodel search needs a single-symbol goal");
    if (hypotheses.signature.symbols.empty())
        throw Error("countermodel search needs at least one hypothesis symbol");
    if (opts.max_size < 2) throw Error("countermodel search starts at size 2");

    CountermodelResult out;
    bool conclusive = true;
    std::mt19937_64 rng(opts.seed);

    for (int n = 2; n <= opts.max_size; ++n) {
        auto [cand, layout] = idempotent_scaffold(hypotheses.signature, n);

        const auto fill_tables = [&](const std::vector<Elem>& fill) {
            std::size_t k = 0;
            for (const SymbolCells& sc : layout) {
                OperationTable& op = cand.ops.at(sc.name);
                for (std::size_t cell : sc.free_cells) op.table[cell] = fill[k++];
            }
        };
        const auto is_countermodel = [&]() {
            ++out.examined;
            if (!satisfies(cand, pool, hypotheses, {}).ok) return false;
            const TermSearch ts = find_term_witness(pool, cand, goal, opts.closure_cap);
            if (ts.status == SearchStatus::Budget) {
                conclusive = false;
                return false;
            }
            return ts.status == SearchStatus::None;
        };

        std::size_t total_free = 0;
        for (const SymbolCells& sc : layout) total_free += sc.free_cells.size();
        std::vector<Elem> fill(total_free, 0);

        if (n == 2) {
            while (true) {
                fill_tables(fill);
                if (is_countermodel()) {
                    out.status = SearchStatus::Found;
                    out.algebra = cand;
                    return out;
                }
                std::size_t d = fill.size();  // ascending, last cell fastest
                while (d > 0) {
                    if (++fill[d - 1] < n) break;
                    fill[d - 1] = 0;
                    --d;
                }
                if (d == 0) break;
            }
        } else {
            conclusive = false;  // sampling never exhausts a larger size
            for (std::size_t s = 0; s < opts.samples; ++s) {
                for (Elem& cell : fill) cell = static_cast<Elem>(rng() % n);
                fill_tables(fill);
                if (is_countermodel()) {
                    out.status = SearchStatus::Found;
                    out.algebra = cand;
                    return out;
                }
            }
        }
    }

    out.status = conclusive ? SearchStatus::None : SearchStatus::Budget;
    return out;
}

}  // namespace malt
