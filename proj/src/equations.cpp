#include "malt/equations.hpp"

#include <algorithm>
#include <string_view>

namespace malt {

PatternRow parse_pattern(const std::string& s) {
    PatternRow row;
    row.reserve(s.size());
    for (char c : s) {
        if (c == 'x')
            row.push_back(XY::X);
        else if (c == 'y')
            row.push_back(XY::Y);
        else
            throw Error(std::string("bad pattern character '") + c + "'");
    }
    return row;
}

std::string pattern_string(const PatternRow& row) {
    std::string s;
    s.reserve(row.size());
    for (XY v : row) s.push_back(xy_char(v));
    return s;
}

bool TaylorSystem::well_formed() const {
    if (symbol.empty() || arity < 1) return false;
    if (coverage.size() != static_cast<std::size_t>(arity)) return false;
    for (const auto& r : rows)
        if (r.lhs.size() != static_cast<std::size_t>(arity) ||
            r.rhs.size() != static_cast<std::size_t>(arity))
            return false;
    for (int i = 0; i < arity; ++i) {
        std::size_t idx = coverage[static_cast<std::size_t>(i)];
        if (idx >= rows.size()) return false;
        if (rows[idx].lhs[static_cast<std::size_t>(i)] != XY::X ||
            rows[idx].rhs[static_cast<std::size_t>(i)] != XY::Y)
            return false;
    }
    return true;
}

bool is_linear(const TermPool& pool, const EquationSystem& sys) {
    for (const auto& eq : sys.equations)
        if (pool.depth(eq.lhs) > 1 || pool.depth(eq.rhs) > 1) return false;
    return true;
}

EquationSystem with_idempotency(TermPool& pool, const EquationSystem& sys) {
    EquationSystem out = sys;
    TermId x = pool.variable("x");
    for (const auto& [name, arity] : sys.signature.symbols) {
        std::vector<TermId> args(static_cast<std::size_t>(arity), x);
        Equation idem{pool.apply(name, args), x};
        bool present = false;
        for (const auto& eq : out.equations)
            if (eq.lhs == idem.lhs && eq.rhs == idem.rhs) present = true;
        if (!present) out.equations.push_back(idem);
    }
    return out;
}

std::optional<ProjectionAssignment> check_trivial(const TermPool& pool,
                                                  const EquationSystem& sys,
                                                  std::uint64_t cap) {
    std::vector<std::pair<std::string, int>> syms(sys.signature.symbols.begin(),
                                                  sys.signature.symbols.end());
    std::uint64_t total = 1;
    for (const auto& [name, arity] : syms) {
        if (arity < 1) throw Error("symbol '" + name + "' has arity < 1");
        if (total > cap / static_cast<std::uint64_t>(arity))
            throw CapExceeded("projection assignment space exceeds cap");
        total *= static_cast<std::uint64_t>(arity);
    }

    std::map<std::string, std::size_t, std::less<>> index_of;
    for (std::size_t i = 0; i < syms.size(); ++i) index_of.emplace(syms[i].first, i);

    std::vector<int> digit(syms.size(), 0);
    auto reduce = [&](TermId t) {
        while (!pool.is_variable(t)) {
            auto it = index_of.find(pool.head(t));
            if (it == index_of.end())
                throw Error("term uses a symbol missing from the signature");
            t = pool.args(t)[static_cast<std::size_t>(digit[it->second])];
        }
        return t;
    };

    for (std::uint64_t step = 0; step < total; ++step) {
        bool ok = true;
        for (const auto& eq : sys.equations)
            if (reduce(eq.lhs) != reduce(eq.rhs)) {
                ok = false;
                break;
            }
        if (ok) {
            ProjectionAssignment pa;
            for (std::size_t i = 0; i < syms.size(); ++i)
                pa.choice[syms[i].first] = digit[i] + 1;
            return pa;
        }
        for (std::size_t i = syms.size(); i-- > 0;) {
            if (++digit[i] < syms[i].second) break;
            digit[i] = 0;
        }
    }
    return std::nullopt;
}

namespace {

// One side of a linear equation as a pattern row. `vars` carries the
// equation-local mapping: vars[0] prints as X, vars[1] as Y.
PatternRow side_pattern(const TermPool& pool, TermId side, const std::string& symbol,
                        int arity, std::vector<TermId>& vars) {
    if (pool.is_variable(side) || pool.head(side) != symbol)
        throw Error("equation side is not an application of '" + symbol + "'");
    auto args = pool.args(side);
    if (static_cast<int>(args.size()) != arity)
        throw Error("application arity mismatch for '" + symbol + "'");
    PatternRow row;
    row.reserve(args.size());
    for (TermId a : args) {
        if (!pool.is_variable(a))
            throw Error("nested application; equation is not linear in '" + symbol + "'");
        auto pos = std::find(vars.begin(), vars.end(), a);
        if (pos == vars.end()) {
            if (vars.size() == 2) throw Error("equation uses more than two variables");
            vars.push_back(a);
            pos = vars.end() - 1;
        }
        row.push_back(pos == vars.begin() ? XY::X : XY::Y);
    }
    return row;
}

}  // namespace

std::variant<TaylorSystem, NotTaylorShape> is_taylor_shape(const TermPool& pool,
                                                           const EquationSystem& sys,
                                                           const std::string& symbol) {
    const int* arity = sys.signature.find(symbol);
    if (!arity) throw Error("symbol '" + symbol + "' is not declared");
    if (sys.equations.empty()) throw Error("empty equation system");

    TaylorSystem ts;
    ts.symbol = symbol;
    ts.arity = *arity;
    for (const auto& eq : sys.equations) {
        std::vector<TermId> vars;
        TaylorRow row;
        row.lhs = side_pattern(pool, eq.lhs, symbol, *arity, vars);
        row.rhs = side_pattern(pool, eq.rhs, symbol, *arity, vars);
        ts.rows.push_back(std::move(row));
    }

    std::size_t given = ts.rows.size();
    std::map<std::size_t, std::size_t> swapped;  // original row -> appended copy
    for (int i = 0; i < ts.arity; ++i) {
        std::size_t at = static_cast<std::size_t>(i);
        std::optional<std::size_t> found;
        for (std::size_t r = 0; r < given && !found; ++r)
            if (ts.rows[r].lhs[at] == XY::X && ts.rows[r].rhs[at] == XY::Y) found = r;
        // A row listing Y on the left serves after swapping its sides,
        // which names the same equation.
        for (std::size_t r = 0; r < given && !found; ++r)
            if (ts.rows[r].lhs[at] == XY::Y && ts.rows[r].rhs[at] == XY::X) {
                auto it = swapped.find(r);
                if (it == swapped.end()) {
                    ts.rows.push_back(TaylorRow{ts.rows[r].rhs, ts.rows[r].lhs});
                    it = swapped.emplace(r, ts.rows.size() - 1).first;
                }
                found = it->second;
            }
        if (!found) return NotTaylorShape{i + 1};
        ts.coverage.push_back(*found);
    }
    return ts;
}

namespace {

TermId pattern_app(TermPool& pool, const std::string& symbol,
                   const std::vector<PatternRow>& blocks, TermId x, TermId y) {
    std::vector<TermId> args;
    for (const auto& b : blocks)
        for (XY v : b) args.push_back(v == XY::X ? x : y);
    return pool.apply(symbol, args);
}

}  // namespace

EquationSystem taylor_to_pair_system(TermPool& pool, const TaylorSystem& ts) {
    if (!ts.well_formed()) throw Error("malformed taylor system");
    int n = ts.arity;
    EquationSystem out;
    out.signature.declare("s", n * n);

    std::vector<TermId> xs;
    for (int i = 0; i < n; ++i) xs.push_back(pool.variable("x" + std::to_string(i + 1)));
    std::vector<TermId> largs, rargs;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            largs.push_back(xs[static_cast<std::size_t>(i)]);
            rargs.push_back(xs[static_cast<std::size_t>(j)]);
        }
    out.equations.push_back(Equation{pool.apply("s", largs), pool.apply("s", rargs)});

    TermId x = pool.variable("x");
    TermId y = pool.variable("y");
    std::vector<PatternRow> lblocks, rblocks;
    for (int j = 0; j < n; ++j) {
        const TaylorRow& row = ts.rows[ts.coverage[static_cast<std::size_t>(j)]];
        lblocks.push_back(row.lhs);
        rblocks.push_back(row.rhs);
    }
    out.equations.push_back(Equation{pattern_app(pool, "s", lblocks, x, y),
                                     pattern_app(pool, "s", rblocks, x, y)});
    return out;
}

Equation single_nontrivial_equation(TermPool& pool, const TaylorSystem& ts) {
    if (!ts.well_formed()) throw Error("malformed taylor system");
    TermId x = pool.variable("x");
    TermId y = pool.variable("y");
    std::vector<TermId> louter, router;
    for (int j = 0; j < ts.arity; ++j) {
        const TaylorRow& row = ts.rows[ts.coverage[static_cast<std::size_t>(j)]];
        louter.push_back(pattern_app(pool, ts.symbol, {row.lhs}, x, y));
        router.push_back(pattern_app(pool, ts.symbol, {row.rhs}, x, y));
    }
    return Equation{pool.apply(ts.symbol, louter), pool.apply(ts.symbol, router)};
}

const std::vector<Column>& double_loop_columns() {
    static const std::vector<Column> cols = [] {
        std::vector<Column> out;
        for (int v = 0; v < 16; ++v) {
            Column c{static_cast<XY>((v >> 3) & 1), static_cast<XY>((v >> 2) & 1),
                     static_cast<XY>((v >> 1) & 1), static_cast<XY>(v & 1)};
            if (c[0] == c[1] && c[2] == c[3]) continue;
            out.push_back(c);
        }
        return out;
    }();
    return cols;
}

int double_loop_slot(const Column& col) {
    const auto& cols = double_loop_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == col) return static_cast<int>(i) + 1;
    return 0;
}

std::variant<NormalizedTwoEquation, TrivialTwoEquation> normalize_two_equation(
    TermPool& pool, const EquationSystem& sys) {
    if (sys.equations.size() != 2) throw Error("expected exactly two equations");
    const Equation& e1 = sys.equations[0];
    const Equation& e2 = sys.equations[1];
    if (pool.is_variable(e1.lhs)) throw Error("equation side is a bare variable");
    std::string symbol(pool.head(e1.lhs));
    const int* arity = sys.signature.find(symbol);
    if (!arity) throw Error("symbol '" + symbol + "' is not declared");
    int n = *arity;

    std::vector<TermId> vars1, vars2;
    PatternRow a1 = side_pattern(pool, e1.lhs, symbol, n, vars1);
    PatternRow a2 = side_pattern(pool, e1.rhs, symbol, n, vars1);
    PatternRow b1 = side_pattern(pool, e2.lhs, symbol, n, vars2);
    PatternRow b2 = side_pattern(pool, e2.rhs, symbol, n, vars2);

    ColumnMatrix matrix;
    for (int i = 0; i < n; ++i) {
        std::size_t at = static_cast<std::size_t>(i);
        Column col{a1[at], a2[at], b1[at], b2[at]};
        int slot = double_loop_slot(col);
        if (slot == 0) return TrivialTwoEquation{i + 1};
        matrix.columns.push_back(col);
        matrix.slots.push_back(slot);
    }
    return NormalizedTwoEquation{builtin_system(pool, "double_loop"), std::move(matrix)};
}

}  // namespace malt
