#include "malt/algebra.hpp"

#include <algorithm>
#include <unordered_map>

namespace malt {

std::uint64_t checked_pow(int n, int k, std::uint64_t cap) {
    if (n < 1 || k < 0) throw Error("checked_pow: bad arguments");
    std::uint64_t r = 1;
    for (int i = 0; i < k; ++i) {
        if (r > cap / static_cast<std::uint64_t>(n)) throw CapExceeded("power exceeds cap");
        r *= static_cast<std::uint64_t>(n);
    }
    if (r > cap) throw CapExceeded("power exceeds cap");
    return r;
}

std::size_t OperationTable::index(int n, int arity, std::span<const Elem> args) {
    if (static_cast<int>(args.size()) != arity) throw Error("argument count mismatch");
    std::size_t idx = 0;
    for (Elem a : args) idx = idx * static_cast<std::size_t>(n) + a;
    return idx;
}

Elem OperationTable::at(int n, std::span<const Elem> args) const {
    return table[index(n, arity, args)];
}

void FiniteAlgebra::validate() const {
    if (size < 1) throw Error("algebra size must be at least 1");
    for (const auto& [name, op] : ops) {
        if (op.arity < 1) throw Error("operation '" + name + "' has arity < 1");
        std::uint64_t cells = checked_pow(size, op.arity, 1ull << 30);
        if (op.table.size() != cells)
            throw Error("operation '" + name + "' has a table of wrong size");
        for (Elem v : op.table)
            if (v >= size) throw Error("operation '" + name + "' has an out-of-range entry");
    }
}

Relation Relation::empty(int universe, int power) {
    if (universe < 1 || power < 1) throw Error("relation needs universe and power >= 1");
    Relation r;
    r.universe = universe;
    r.power = power;
    r.bits.assign(checked_pow(universe, power, 1ull << 26), false);
    return r;
}

std::size_t Relation::index(std::span<const Elem> t) const {
    if (static_cast<int>(t.size()) != power) throw Error("tuple length mismatch");
    std::size_t idx = 0;
    for (Elem a : t) {
        if (a >= universe) throw Error("tuple entry out of range");
        idx = idx * static_cast<std::size_t>(universe) + a;
    }
    return idx;
}

bool Relation::contains(std::span<const Elem> t) const { return bits[index(t)]; }

void Relation::add(std::span<const Elem> t) {
    std::size_t i = index(t);
    if (!bits[i]) {
        bits[i] = true;
        ++count;
    }
}

void Relation::add(std::initializer_list<Elem> t) {
    add(std::span<const Elem>(t.begin(), t.size()));
}

std::vector<Tuple> Relation::tuples() const {
    std::vector<Tuple> out;
    out.reserve(count);
    Tuple t(static_cast<std::size_t>(power), 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) out.push_back(t);
        for (std::size_t j = t.size(); j-- > 0;) {
            if (static_cast<int>(++t[j]) < universe) break;
            t[j] = 0;
        }
    }
    return out;
}

bool Relation::edge(Elem a, Elem b) const {
    Elem t[2] = {a, b};
    return contains(std::span<const Elem>(t, 2));
}

void Relation::add_edge(Elem a, Elem b) {
    Elem t[2] = {a, b};
    add(std::span<const Elem>(t, 2));
}

bool Relation::is_symmetric() const {
    if (power != 2) throw Error("symmetry is a binary-relation property");
    for (Elem a = 0; a < universe; ++a)
        for (Elem b = 0; b < universe; ++b)
            if (edge(a, b) != edge(b, a)) return false;
    return true;
}

std::vector<Elem> Relation::out_neighbors(Elem a) const {
    if (power != 2) throw Error("neighbors need a binary relation");
    std::vector<Elem> out;
    for (Elem b = 0; b < universe; ++b)
        if (edge(a, b)) out.push_back(b);
    return out;
}

std::vector<Elem> Relation::in_neighbors(Elem a) const {
    if (power != 2) throw Error("neighbors need a binary relation");
    std::vector<Elem> out;
    for (Elem b = 0; b < universe; ++b)
        if (edge(b, a)) out.push_back(b);
    return out;
}

namespace {

// Evaluation of one term within one variable scope. Nodes are memoized per
// scope; entering a bound definition opens a fresh scope for its body.
Elem eval_scoped(const FiniteAlgebra& A, const TermPool& pool, TermId t,
                 const std::map<std::string, TermDef>& binding,
                 const std::map<std::string, Elem>& env,
                 std::unordered_map<TermId, Elem>& memo, int depth_guard) {
    if (depth_guard <= 0) throw Error("binding recursion too deep (cyclic definitions?)");
    if (pool.is_variable(t)) {
        auto it = env.find(std::string(pool.var_name(t)));
        if (it == env.end())
            throw Error("unbound variable '" + std::string(pool.var_name(t)) + "'");
        return it->second;
    }
    auto hit = memo.find(t);
    if (hit != memo.end()) return hit->second;
    std::string head(pool.head(t));
    auto args = pool.args(t);
    Tuple vals;
    vals.reserve(args.size());
    for (TermId a : args)
        vals.push_back(eval_scoped(A, pool, a, binding, env, memo, depth_guard));
    Elem out;
    auto op = A.ops.find(head);
    if (op != A.ops.end()) {
        out = op->second.at(A.size, vals);
    } else {
        auto def = binding.find(head);
        if (def == binding.end()) throw Error("symbol '" + head + "' has no interpretation");
        if (def->second.params.size() != vals.size())
            throw Error("binding for '" + head + "' has wrong arity");
        std::map<std::string, Elem> inner;
        for (std::size_t i = 0; i < vals.size(); ++i)
            inner[def->second.params[i]] = vals[i];
        std::unordered_map<TermId, Elem> inner_memo;
        out = eval_scoped(A, pool, def->second.body, binding, inner, inner_memo,
                          depth_guard - 1);
    }
    memo.emplace(t, out);
    return out;
}

}  // namespace

Elem eval_term_at(const FiniteAlgebra& A, const TermPool& pool, TermId t,
                  const std::map<std::string, TermDef>& binding,
                  const std::map<std::string, Elem>& env) {
    std::unordered_map<TermId, Elem> memo;
    return eval_scoped(A, pool, t, binding, env, memo, 64);
}

OperationTable eval_term(const FiniteAlgebra& A, const TermPool& pool, const TermDef& def,
                         std::uint64_t max_cells) {
    int arity = static_cast<int>(def.params.size());
    if (arity < 1) throw Error("term needs at least one parameter");
    std::uint64_t cells = checked_pow(A.size, arity, max_cells);

    // Compile the DAG once: topological node order with resolved argument
    // and parameter indices, then run the straight-line program per row.
    std::vector<TermId> order = pool.reachable(def.body);
    std::unordered_map<TermId, std::size_t> slot;
    for (std::size_t i = 0; i < order.size(); ++i) slot[order[i]] = i;
    struct Ins {
        const OperationTable* op = nullptr;
        int param = -1;
        std::vector<std::size_t> args;
    };
    std::vector<Ins> code(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        TermId t = order[i];
        if (pool.is_variable(t)) {
            auto name = pool.var_name(t);
            auto at = std::find(def.params.begin(), def.params.end(), name);
            if (at == def.params.end())
                throw Error("variable '" + std::string(name) + "' not among parameters");
            code[i].param = static_cast<int>(at - def.params.begin());
        } else {
            auto op = A.ops.find(std::string(pool.head(t)));
            if (op == A.ops.end())
                throw Error("symbol '" + std::string(pool.head(t)) +
                            "' is not a basic operation");
            if (op->second.arity != static_cast<int>(pool.args(t).size()))
                throw Error("arity mismatch for '" + std::string(pool.head(t)) + "'");
            code[i].op = &op->second;
            for (TermId a : pool.args(t)) code[i].args.push_back(slot.at(a));
        }
    }

    OperationTable out;
    out.arity = arity;
    out.table.resize(cells);
    Tuple assignment(static_cast<std::size_t>(arity), 0);
    std::vector<Elem> value(order.size());
    Tuple argbuf;
    for (std::uint64_t row = 0; row < cells; ++row) {
        for (std::size_t i = 0; i < code.size(); ++i) {
            if (code[i].param >= 0) {
                value[i] = assignment[static_cast<std::size_t>(code[i].param)];
            } else {
                argbuf.clear();
                for (std::size_t s : code[i].args) argbuf.push_back(value[s]);
                value[i] = code[i].op->at(A.size, argbuf);
            }
        }
        out.table[row] = value[slot.at(def.body)];
        for (std::size_t j = assignment.size(); j-- > 0;) {
            if (static_cast<int>(++assignment[j]) < A.size) break;
            assignment[j] = 0;
        }
    }
    return out;
}

SatisfactionReport satisfies(const FiniteAlgebra& A, const TermPool& pool,
                             const EquationSystem& sys,
                             const std::map<std::string, TermDef>& binding) {
    SatisfactionReport report;
    for (std::size_t e = 0; e < sys.equations.size(); ++e) {
        const Equation& eq = sys.equations[e];
        std::vector<std::string> vars = pool.variables_in_order(eq.lhs);
        for (const auto& v : pool.variables_in_order(eq.rhs))
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
        std::uint64_t total = checked_pow(A.size, static_cast<int>(vars.size()), 1ull << 27);
        Tuple assignment(vars.size(), 0);
        for (std::uint64_t row = 0; row < total; ++row) {
            std::map<std::string, Elem> env;
            for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = assignment[i];
            Elem l = eval_term_at(A, pool, eq.lhs, binding, env);
            Elem r = eval_term_at(A, pool, eq.rhs, binding, env);
            if (l != r) {
                report.ok = false;
                report.equation = e;
                report.variables = vars;
                report.assignment = assignment;
                report.lhs = l;
                report.rhs = r;
                return report;
            }
            for (std::size_t j = assignment.size(); j-- > 0;) {
                if (static_cast<int>(++assignment[j]) < A.size) break;
                assignment[j] = 0;
            }
        }
    }
    return report;
}

namespace {

bool shape_rows(const OperationTable& op, int n, Shape shape, ShapeReport& report) {
    int k = op.arity;
    auto fail = [&](std::initializer_list<Elem> witness) {
        report.ok = false;
        report.counterexample.assign(witness.begin(), witness.end());
        return false;
    };
    switch (shape) {
        case Shape::Idempotent: {
            for (Elem a = 0; a < n; ++a) {
                Tuple row(static_cast<std::size_t>(k), a);
                if (op.at(n, row) != a) return fail({a});
            }
            return true;
        }
        case Shape::NearUnanimity:
        case Shape::WeakNearUnanimity: {
            for (Elem x = 0; x < n; ++x)
                for (Elem y = 0; y < n; ++y) {
                    Tuple row(static_cast<std::size_t>(k), x);
                    row[0] = y;
                    Elem first = op.at(n, row);
                    if (shape == Shape::NearUnanimity && first != x) return fail({x, y});
                    for (int i = 1; i < k; ++i) {
                        Tuple r(static_cast<std::size_t>(k), x);
                        r[static_cast<std::size_t>(i)] = y;
                        if (op.at(n, r) != first) return fail({x, y});
                    }
                }
            return true;
        }
        case Shape::Cyclic: {
            std::uint64_t total = checked_pow(n, k, 1ull << 27);
            Tuple row(static_cast<std::size_t>(k), 0);
            for (std::uint64_t i = 0; i < total; ++i) {
                Tuple shifted(row.begin() + 1, row.end());
                shifted.push_back(row[0]);
                if (op.at(n, row) != op.at(n, shifted)) {
                    report.ok = false;
                    report.counterexample = row;
                    return false;
                }
                for (std::size_t j = row.size(); j-- > 0;) {
                    if (static_cast<int>(++row[j]) < n) break;
                    row[j] = 0;
                }
            }
            return true;
        }
        case Shape::Siggers6: {
            if (k != 6) throw Error("siggers6 shape needs a 6-ary operation");
            for (Elem x = 0; x < n; ++x)
                for (Elem y = 0; y < n; ++y)
                    for (Elem z = 0; z < n; ++z) {
                        Tuple l = {x, y, x, z, y, z};
                        Tuple r = {y, x, z, x, z, y};
                        if (op.at(n, l) != op.at(n, r)) return fail({x, y, z});
                    }
            return true;
        }
        case Shape::Siggers4: {
            if (k != 4) throw Error("siggers4 shape needs a 4-ary operation");
            for (Elem r0 = 0; r0 < n; ++r0)
                for (Elem a = 0; a < n; ++a)
                    for (Elem e = 0; e < n; ++e) {
                        Tuple l = {r0, a, r0, e};
                        Tuple r = {a, r0, e, a};
                        if (op.at(n, l) != op.at(n, r)) return fail({r0, a, e});
                    }
            return true;
        }
    }
    throw Error("unknown shape");
}

}  // namespace

ShapeReport check_shape(const OperationTable& op, int n, Shape shape) {
    if (op.arity < 1) throw Error("operation has arity < 1");
    if ((shape == Shape::NearUnanimity || shape == Shape::WeakNearUnanimity) && op.arity < 2)
        throw Error("near-unanimity shapes need arity >= 2");
    ShapeReport report;
    shape_rows(op, n, shape, report);
    return report;
}

TaylorOperationReport is_taylor_operation(const OperationTable& op, int n,
                                          const std::string& symbol) {
    int k = op.arity;
    if (k < 1 || k > 24) throw Error("taylor analysis supports arities 1..24");
    TaylorOperationReport report;
    report.idempotent = check_shape(op, n, Shape::Idempotent).ok;

    // Binary table induced by each x/y pattern; patterns sharing a table are
    // two sides of a satisfied two-variable equation.
    std::uint32_t patterns = 1u << k;
    std::vector<std::vector<Elem>> binary(patterns);
    Tuple row(static_cast<std::size_t>(k), 0);
    for (std::uint32_t p = 0; p < patterns; ++p) {
        auto& tbl = binary[p];
        tbl.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        for (Elem a = 0; a < n; ++a)
            for (Elem b = 0; b < n; ++b) {
                for (int i = 0; i < k; ++i)
                    row[static_cast<std::size_t>(i)] =
                        ((p >> (k - 1 - i)) & 1u) ? b : a;
                tbl.push_back(op.at(n, row));
            }
    }
    std::map<std::vector<Elem>, std::vector<std::uint32_t>> groups;
    for (std::uint32_t p = 0; p < patterns; ++p) groups[binary[p]].push_back(p);

    TaylorSystem ts;
    ts.symbol = symbol;
    ts.arity = k;
    for (int i = 0; i < k; ++i) {
        std::uint32_t bit = 1u << (k - 1 - i);
        bool covered = false;
        for (std::uint32_t l = 0; l < patterns && !covered; ++l) {
            if (l & bit) continue;
            for (std::uint32_t r : groups[binary[l]]) {
                if (!(r & bit)) continue;
                TaylorRow trow;
                for (int j = 0; j < k; ++j) {
                    std::uint32_t b = 1u << (k - 1 - j);
                    trow.lhs.push_back((l & b) ? XY::Y : XY::X);
                    trow.rhs.push_back((r & b) ? XY::Y : XY::X);
                }
                ts.rows.push_back(std::move(trow));
                ts.coverage.push_back(ts.rows.size() - 1);
                covered = true;
                break;
            }
        }
        if (!covered) {
            report.first_uncovered = i + 1;
            return report;
        }
    }
    report.system = std::move(ts);
    return report;
}

CompatibilityReport compatible(const OperationTable& op, const Relation& R,
                               std::uint64_t budget) {
    CompatibilityReport report;
    std::vector<Tuple> tuples = R.tuples();
    if (tuples.empty()) return report;
    checked_pow(static_cast<int>(tuples.size()), op.arity, budget);
    std::vector<std::size_t> pick(static_cast<std::size_t>(op.arity), 0);
    Tuple image(static_cast<std::size_t>(R.power), 0);
    Tuple column(static_cast<std::size_t>(op.arity), 0);
    while (true) {
        for (int c = 0; c < R.power; ++c) {
            for (int i = 0; i < op.arity; ++i)
                column[static_cast<std::size_t>(i)] =
                    tuples[pick[static_cast<std::size_t>(i)]][static_cast<std::size_t>(c)];
            image[static_cast<std::size_t>(c)] = op.at(R.universe, column);
        }
        if (!R.contains(image)) {
            report.ok = false;
            for (std::size_t i : pick) report.rows.push_back(tuples[i]);
            report.image = image;
            return report;
        }
        bool rolled_over = true;
        for (std::size_t j = pick.size(); j-- > 0;) {
            if (++pick[j] < tuples.size()) {
                rolled_over = false;
                break;
            }
            pick[j] = 0;
        }
        if (rolled_over) return report;
    }
}

std::optional<AbsorbWitness> absorption_failure(const std::vector<Elem>& X,
                                                const std::vector<Elem>& Y,
                                                const OperationTable& op, int n,
                                                std::uint64_t budget) {
    if (X.empty() || Y.empty()) return std::nullopt;
    int k = op.arity;
    std::uint64_t fills = checked_pow(static_cast<int>(X.size()), k - 1, budget);
    std::vector<bool> in_x(static_cast<std::size_t>(n), false);
    for (Elem x : X) in_x[x] = true;
    for (int i = 0; i < k; ++i) {
        std::vector<std::size_t> pick(static_cast<std::size_t>(k - 1), 0);
        for (std::uint64_t f = 0; f < fills; ++f) {
            for (Elem y : Y) {
                Tuple args(static_cast<std::size_t>(k), 0);
                std::size_t at = 0;
                for (int j = 0; j < k; ++j)
                    args[static_cast<std::size_t>(j)] =
                        (j == i) ? y : X[pick[at++]];
                Elem v = op.at(n, args);
                if (!in_x[v]) return AbsorbWitness{i + 1, args, v};
            }
            for (std::size_t j = pick.size(); j-- > 0;) {
                if (++pick[j] < X.size()) break;
                pick[j] = 0;
            }
        }
    }
    return std::nullopt;
}

namespace {

AbsorptionReport neighborhood_absorption(const Relation& R, const OperationTable& op,
                                         std::uint64_t budget, bool whole_support) {
    if (R.power != 2) throw Error("loop-style absorption needs a binary relation");
    if (!R.is_symmetric()) throw Error("relation must be symmetric");
    std::vector<Elem> support;
    for (Elem v = 0; v < R.universe; ++v)
        if (!R.out_neighbors(v).empty()) support.push_back(v);
    AbsorptionReport report;
    for (Elem v : support) {
        std::vector<Elem> plus = R.out_neighbors(v);
        std::vector<Elem> Y;
        if (whole_support) {
            Y = support;
        } else {
            Y = plus;
            if (std::find(Y.begin(), Y.end(), v) == Y.end()) {
                Y.push_back(v);
                std::sort(Y.begin(), Y.end());
            }
        }
        auto witness = absorption_failure(plus, Y, op, R.universe, budget);
        if (witness) {
            report.ok = false;
            report.vertex = v;
            report.witness = *witness;
            return report;
        }
    }
    return report;
}

}  // namespace

AbsorptionReport produces_enough_absorption(const Relation& R, const OperationTable& op,
                                            std::uint64_t budget) {
    return neighborhood_absorption(R, op, budget, false);
}

AbsorptionReport semiabsorption_report(const Relation& R, const OperationTable& op,
                                       std::uint64_t budget) {
    auto comp = compatible(op, R, budget);
    if (!comp.ok) {
        AbsorptionReport report;
        report.ok = false;
        report.compatible = false;
        return report;
    }
    return neighborhood_absorption(R, op, budget, true);
}

OperationTable nu_from_semiabsorbing(const OperationTable& op, int n) {
    if (op.arity < 1) throw Error("operation has arity < 1");
    int k = std::max(op.arity, 3);
    return make_table(n, k, [&](std::span<const Elem> args) -> Elem {
        std::vector<int> freq(static_cast<std::size_t>(n), 0);
        for (Elem a : args) ++freq[a];
        for (Elem v = 0; v < n; ++v)
            if (freq[v] >= k - 1) return v;
        Tuple inner(args.begin(), args.begin() + op.arity);
        return op.at(n, inner);
    });
}

}  // namespace malt
