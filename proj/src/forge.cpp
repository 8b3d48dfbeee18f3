#include "malt/forge.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "malt/error.hpp"

namespace malt {

namespace {

// The four row patterns whose columns enumerate the valid slot values.
std::string_view slot_row(std::size_t q) {
    static const std::array<std::string, 4> rows = [] {
        std::array<std::string, 4> r;
        for (const Column& col : double_loop_columns())
            for (std::size_t q2 = 0; q2 < 4; ++q2) r[q2] += xy_char(col[q2]);
        return r;
    }();
    return rows[q];
}

// Evaluates def on the arguments selected by pattern: 'x' -> vals[0],
// 'y' -> vals[1], 'z' -> vals[2].  Bodies must be over basic operations.
Elem eval_pattern(const FiniteAlgebra& A, const TermPool& pool, const TermDef& def,
                  std::string_view pattern, std::span<const Elem> vals) {
    if (pattern.size() != def.params.size())
        throw Error("pattern length does not match the parameter count");
    std::map<std::string, Elem> env;
    for (std::size_t i = 0; i < pattern.size(); ++i)
        env[def.params[i]] = vals[static_cast<std::size_t>(pattern[i] - 'x')];
    return eval_term_at(A, pool, def.body, {}, env);
}

// All listed argument patterns must give the same value everywhere.
void check_patterns_agree(const FiniteAlgebra& A, const TermPool& pool, const TermDef& def,
                          const std::vector<std::string_view>& patterns, int nvars,
                          const char* what) {
    Tuple vals(static_cast<std::size_t>(nvars), 0);
    while (true) {
        Elem first = eval_pattern(A, pool, def, patterns.front(), vals);
        for (std::size_t p = 1; p < patterns.size(); ++p)
            if (eval_pattern(A, pool, def, patterns[p], vals) != first)
                throw Error(std::string("internal: ") + what +
                            " failed its identity recheck");
        std::size_t j = vals.size();
        while (j-- > 0) {
            if (++vals[j] < A.size) break;
            vals[j] = 0;
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
}

std::vector<std::string> numbered_names(const char* stem, int count) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(count));
    for (int i = 1; i <= count; ++i) names.push_back(stem + std::to_string(i));
    return names;
}

TermId instantiate(TermPool& pool, const TermDef& def, const std::vector<TermId>& args) {
    if (args.size() != def.params.size())
        throw Error("instantiation arity mismatch");
    std::unordered_map<std::string, TermId> by_var;
    for (std::size_t i = 0; i < args.size(); ++i) by_var[def.params[i]] = args[i];
    return pool.substitute(def.body, by_var);
}

// Argument list selected by a pattern string over an x/y/z alphabet.
std::vector<TermId> pattern_args(std::string_view pattern, TermId x, TermId y, TermId z) {
    std::vector<TermId> args;
    args.reserve(pattern.size());
    for (char ch : pattern) {
        switch (ch) {
            case 'x': args.push_back(x); break;
            case 'y': args.push_back(y); break;
            case 'z': args.push_back(z); break;
            default: throw Error("unknown pattern character");
        }
    }
    return args;
}

void require_idempotent_ops(const FiniteAlgebra& A) {
    for (const auto& [name, op] : A.ops) {
        ShapeReport idem = check_shape(op, A.size, Shape::Idempotent);
        if (!idem.ok)
            throw Error("operation '" + name + "' is not idempotent");
    }
}

}  // namespace

const char* to_string(ForgeStatus s) {
    switch (s) {
        case ForgeStatus::Found: return "found";
        case ForgeStatus::NoWitness: return "no-witness";
        case ForgeStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

SiggersForge siggers_from_nu(TermPool& pool, const FiniteAlgebra& A,
                             const std::string& op_name) {
    A.validate();
    auto found = A.ops.find(op_name);
    if (found == A.ops.end())
        throw Error("algebra has no operation named '" + op_name + "'");
    const OperationTable& nu = found->second;
    const int n = A.size;
    if (!check_shape(nu, n, Shape::NearUnanimity).ok)
        throw Error("operation '" + op_name + "' is not near unanimity");

    FiniteAlgebra B{n, {{op_name, nu}}};
    const auto p3 = static_cast<std::size_t>(checked_pow(n, 3, 1ull << 22));
    const std::vector<Tuple> projs = power_projections(n, 3);

    WitnessedClosure F = term_clone_slice(B, 3);
    if (!F.complete)
        throw CapExceeded("free algebra on three generators exceeded the closure cap");
    if (F.elements.size() > 60'000)
        throw CapExceeded("free algebra too large to index");

    // Pairs (lhs, rhs) of the target identity, read off column by column.
    static constexpr int kPairs[6][2] = {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}};
    std::vector<Tuple> pair_gens;
    pair_gens.reserve(6);
    for (const auto& pr : kPairs) {
        Tuple t = projs[static_cast<std::size_t>(pr[0])];
        const Tuple& snd = projs[static_cast<std::size_t>(pr[1])];
        t.insert(t.end(), snd.begin(), snd.end());
        pair_gens.push_back(std::move(t));
    }
    WitnessedClosure Rw = generate_closure(B, 2 * p3, pair_gens, {});
    if (!Rw.complete) throw CapExceeded("pair closure exceeded the cap");

    SiggersForge out;
    out.free_size = F.elements.size();
    out.pair_size = Rw.elements.size();

    out.digraph = Relation::empty(static_cast<int>(F.elements.size()), 2);
    for (const Tuple& e : Rw.elements) {
        Tuple lhs(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(p3));
        Tuple rhs(e.begin() + static_cast<std::ptrdiff_t>(p3), e.end());
        auto ia = F.index_of(lhs), ib = F.index_of(rhs);
        if (!ia || !ib) throw Error("internal: pair closure left the free algebra");
        out.digraph.add_edge(static_cast<Elem>(*ia), static_cast<Elem>(*ib));
    }

    const int k = nu.arity;
    Tuple pick(static_cast<std::size_t>(k));
    out.induced = make_table(static_cast<int>(F.elements.size()), k,
                             [&](std::span<const Elem> args) {
                                 Tuple value(p3);
                                 for (std::size_t c = 0; c < p3; ++c) {
                                     for (int i = 0; i < k; ++i)
                                         pick[static_cast<std::size_t>(i)] =
                                             F.elements[args[static_cast<std::size_t>(i)]][c];
                                     value[c] = nu.at(n, pick);
                                 }
                                 auto idx = F.index_of(value);
                                 if (!idx)
                                     throw Error("internal: free algebra is not closed");
                                 return static_cast<Elem>(*idx);
                             });

    out.certificate = find_loop(out.digraph, out.induced, LoopMode::NearUnanimity);
    out.loop_vertex = out.certificate.loop;

    Tuple doubled = F.elements[out.loop_vertex];
    doubled.insert(doubled.end(), F.elements[out.loop_vertex].begin(),
                   F.elements[out.loop_vertex].end());
    auto widx = Rw.index_of(doubled);
    if (!widx) throw Error("internal: loop vertex is missing from the pair closure");

    std::vector<std::string> names = numbered_names("x", 6);
    out.term = TermDef{names, extract_witness(pool, Rw, *widx, names)};
    check_patterns_agree(A, pool, out.term, {"xyxzyz", "yxzxzy"}, 3,
                         "the six-variable witness");
    return out;
}

DoubleLoopForge double_loop_from_taylor(TermPool& pool, const FiniteAlgebra& A,
                                        std::size_t cap) {
    A.validate();
    require_idempotent_ops(A);
    DoubleLoopForge out;
    const int n = A.size;
    const auto p2 = static_cast<std::size_t>(checked_pow(n, 2, 1ull << 20));
    const std::vector<Tuple> bproj = power_projections(n, 2);

    ClosureOptions scale;
    scale.cap = cap;
    out.binary_free_size = term_clone_slice(A, 2, scale).elements.size();

    std::vector<Tuple> gens;
    gens.reserve(12);
    for (const Column& col : double_loop_columns()) {
        Tuple g;
        g.reserve(4 * p2);
        for (std::size_t q = 0; q < 4; ++q) {
            const Tuple& block = bproj[col[q] == XY::X ? 0 : 1];
            g.insert(g.end(), block.begin(), block.end());
        }
        gens.push_back(std::move(g));
    }

    ClosureOptions opts;
    opts.cap = cap;
    opts.target = [p2](std::span<const Elem> e) {
        const auto d = static_cast<std::ptrdiff_t>(p2);
        return std::equal(e.begin(), e.begin() + d, e.begin() + d) &&
               std::equal(e.begin() + 2 * d, e.begin() + 3 * d, e.begin() + 3 * d);
    };
    WitnessedClosure Q = generate_closure(A, 4 * p2, gens, opts);
    out.closure_size = Q.elements.size();
    out.rounds = Q.rounds;

    if (Q.target_hit) {
        std::vector<std::string> names = numbered_names("z", 12);
        out.term = TermDef{names, extract_witness(pool, Q, *Q.target_hit, names)};
        check_patterns_agree(A, pool, out.term, {slot_row(0), slot_row(1)}, 2,
                             "the paired witness (first identity)");
        check_patterns_agree(A, pool, out.term, {slot_row(2), slot_row(3)}, 2,
                             "the paired witness (second identity)");
        out.status = ForgeStatus::Found;
    } else if (Q.complete) {
        out.status = ForgeStatus::NoWitness;
    } else {
        out.status = ForgeStatus::Inconclusive;
    }
    return out;
}

TermDef strong_from_double_loop(TermPool& pool, const TermDef& d) {
    if (d.params.size() != 12)
        throw Error("strong composition needs a 12-parameter term");
    const std::vector<Column>& cols = double_loop_columns();

    std::vector<std::string> names = numbered_names("z", 12);
    std::vector<TermId> z;
    z.reserve(12);
    for (const std::string& nm : names) z.push_back(pool.variable(nm));

    // Leaf (i,j,k) takes the variable whose column is reachable from the
    // columns at i, j, k; the combination below can never produce one of the
    // four forbidden values, because an equal first pair at j forces an
    // unequal second pair at j.
    auto leaf = [&](std::size_t i, std::size_t j, std::size_t k) {
        Column c{xy_add(cols[j][0], cols[k][2]), xy_add(cols[j][1], cols[k][2]),
                 xy_add(cols[j][2], cols[i][0]), xy_add(cols[j][3], cols[i][0])};
        int slot = double_loop_slot(c);
        if (slot == 0) throw Error("internal: leaf column fell outside the slots");
        return z[static_cast<std::size_t>(slot - 1)];
    };

    std::vector<TermId> mids(12);
    for (std::size_t i = 0; i < 12; ++i) {
        std::vector<TermId> inner(12);
        for (std::size_t j = 0; j < 12; ++j) {
            std::vector<TermId> leaves(12);
            for (std::size_t k = 0; k < 12; ++k) leaves[k] = leaf(i, j, k);
            inner[j] = instantiate(pool, d, leaves);
        }
        mids[i] = instantiate(pool, d, inner);
    }
    return TermDef{names, instantiate(pool, d, mids)};
}

TerminatorTerms terminator_from_strong(TermPool& pool, const TermDef& t) {
    if (t.params.size() != 12)
        throw Error("the terminator derivation needs a 12-parameter term");
    TermId x = pool.variable("x"), y = pool.variable("y"), zv = pool.variable("z");
    TermId u = pool.variable("u"), v = pool.variable("v");

    auto from_xyz = [&](std::string_view pattern) {
        return instantiate(pool, t, pattern_args(pattern, x, y, zv));
    };
    auto from_uvxy = [&](std::string_view pattern) {
        // alphabet u,v,x,y for the four-parameter intermediates
        std::vector<TermId> args;
        args.reserve(pattern.size());
        for (char ch : pattern) {
            switch (ch) {
                case 'u': args.push_back(u); break;
                case 'v': args.push_back(v); break;
                case 'x': args.push_back(x); break;
                case 'y': args.push_back(y); break;
                default: throw Error("unknown pattern character");
            }
        }
        return instantiate(pool, t, args);
    };

    TerminatorTerms out;
    out.c = TermDef{{"x", "y", "z"}, from_xyz("yyxzzxxzzxyy")};
    out.q1 = TermDef{{"u", "v", "x", "y"}, from_uvxy("xxuuuuvvvvyy")};
    out.q2 = TermDef{{"u", "v", "x", "y"}, from_uvxy("uvxuvyxuvyuv")};

    auto q_at = [&](const TermDef& q, TermId a1, TermId a2, TermId a3, TermId a4) {
        return instantiate(pool, q, {a1, a2, a3, a4});
    };
    out.defs["c"] = out.c;
    out.defs["c1"] = TermDef{{"x", "y", "z"}, q_at(out.q1, x, y, zv, zv)};
    out.defs["c2"] = TermDef{{"x", "y", "z"}, q_at(out.q2, x, y, zv, zv)};
    out.defs["c11"] = TermDef{{"x", "y", "z"}, q_at(out.q1, x, zv, y, x)};
    out.defs["c12"] = TermDef{{"x", "y", "z"}, q_at(out.q1, zv, x, y, x)};
    out.defs["c21"] = TermDef{{"y", "x", "z"}, q_at(out.q2, x, zv, y, x)};
    out.defs["c22"] = TermDef{{"y", "x", "z"}, q_at(out.q2, zv, x, y, x)};
    return out;
}

WeakCubeForge weak_3cube_from_strong(TermPool& pool, const FiniteAlgebra& A,
                                     const TermDef& strong, std::size_t cap) {
    A.validate();
    if (strong.params.size() != 12)
        throw Error("cube synthesis needs a 12-parameter term");
    check_patterns_agree(A, pool, strong,
                         {slot_row(0), slot_row(1), slot_row(2), slot_row(3)}, 2,
                         "the chained input term");

    FiniteAlgebra Ad = induced_algebra(A, pool, {{"d", strong}});
    const int n = A.size;
    const auto p2 = static_cast<std::size_t>(checked_pow(n, 2, 1ull << 20));
    const std::vector<Tuple> bproj = power_projections(n, 2);

    static constexpr const char* kCubeRows[3] = {"xyyyxx", "yxyxyx", "yyxxxy"};
    std::vector<Tuple> gens;
    gens.reserve(6);
    for (std::size_t m = 0; m < 6; ++m) {
        Tuple g;
        g.reserve(3 * p2);
        for (const char* row : kCubeRows) {
            const Tuple& block = bproj[row[m] == 'x' ? 0 : 1];
            g.insert(g.end(), block.begin(), block.end());
        }
        gens.push_back(std::move(g));
    }

    ClosureOptions opts;
    opts.cap = cap;
    opts.target = [p2](std::span<const Elem> e) {
        const auto d = static_cast<std::ptrdiff_t>(p2);
        return std::equal(e.begin(), e.begin() + d, e.begin() + d) &&
               std::equal(e.begin() + d, e.begin() + 2 * d, e.begin() + 2 * d);
    };
    WitnessedClosure Q = generate_closure(Ad, 3 * p2, gens, opts);

    WeakCubeForge out;
    out.closure_size = Q.elements.size();
    out.rounds = Q.rounds;
    if (Q.target_hit) {
        std::vector<std::string> names = numbered_names("x", 6);
        TermId raw = extract_witness(pool, Q, *Q.target_hit, names);
        out.term = TermDef{names, substitute_symbols(pool, raw, {{"d", strong}})};
        check_patterns_agree(A, pool, out.term, {kCubeRows[0], kCubeRows[1], kCubeRows[2]},
                             2, "the cube witness");
        out.status = ForgeStatus::Found;
    } else if (Q.complete) {
        out.status = ForgeStatus::NoWitness;
    } else {
        out.status = ForgeStatus::Inconclusive;
    }
    return out;
}

CubeRecipe weak_3cube_recipe(const FiniteAlgebra& A, const TermPool& pool,
                             const TermDef& strong) {
    A.validate();
    if (strong.params.size() != 12)
        throw Error("the cube recipe needs a 12-parameter term");
    const int n = A.size;
    const OperationTable T = eval_term(A, pool, strong);
    const std::vector<Column>& cols = double_loop_columns();

    auto row_table = [&](std::size_t q) {
        return make_table(n, 2, [&](std::span<const Elem> ab) {
            Tuple args(12);
            for (std::size_t j = 0; j < 12; ++j)
                args[j] = cols[j][q] == XY::X ? ab[0] : ab[1];
            return T.at(n, args);
        });
    };
    OperationTable rows[4] = {row_table(0), row_table(1), row_table(2), row_table(3)};
    for (int q = 1; q < 4; ++q)
        if (rows[q].table != rows[0].table)
            throw Error("term does not satisfy the chained identities; "
                        "the row tables disagree");

    CubeRecipe rec;
    rec.dot = rows[0];
    auto dot = [&](Elem a, Elem b) {
        Tuple ab{a, b};
        return rec.dot.at(n, ab);
    };
    rec.x1 = make_table(n, 2, [&](std::span<const Elem> ab) {
        Elem p = dot(ab[0], ab[1]);
        return dot(dot(p, ab[0]), dot(ab[1], p));
    });
    rec.y1 = make_table(n, 2, [&](std::span<const Elem> ab) {
        Elem p = dot(ab[1], ab[0]);
        return dot(dot(p, ab[1]), dot(ab[0], p));
    });
    auto at2 = [&](const OperationTable& op, Elem a, Elem b) {
        Tuple ab{a, b};
        return op.at(n, ab);
    };
    rec.x2 = make_table(n, 2, [&](std::span<const Elem> ab) {
        Elem p = at2(rec.x1, ab[0], ab[1]), q = at2(rec.y1, ab[0], ab[1]);
        return dot(dot(p, q), dot(q, p));
    });
    rec.y2 = make_table(n, 2, [&](std::span<const Elem> ab) {
        Elem p = at2(rec.x1, ab[0], ab[1]), q = at2(rec.y1, ab[0], ab[1]);
        return dot(dot(q, p), dot(p, q));
    });

    static constexpr std::string_view kZPattern = "yyxxxyxxxyxx";
    rec.z = make_table(n, 2, [&](std::span<const Elem> ab) {
        Elem p = at2(rec.x2, ab[0], ab[1]), q = at2(rec.y2, ab[0], ab[1]);
        Tuple args(12);
        for (std::size_t j = 0; j < 12; ++j) args[j] = kZPattern[j] == 'x' ? p : q;
        return T.at(n, args);
    });

    // Column patterns of the two membership displays: first coordinate from
    // the z row, the others from the two product rows.  Every column must be
    // one of the six generating triples.
    static constexpr const char* kCubeRows[3] = {"xyyyxx", "yxyxyx", "yyxxxy"};
    auto is_generator_column = [&](char a, char b, char c) {
        for (std::size_t m = 0; m < 6; ++m)
            if (kCubeRows[0][m] == a && kCubeRows[1][m] == b && kCubeRows[2][m] == c)
                return true;
        return false;
    };
    bool ok = true;
    for (std::size_t j = 0; j < 12; ++j) {
        ok = ok && is_generator_column(kZPattern[j], xy_char(cols[j][0]),
                                       xy_char(cols[j][1]));
        ok = ok && is_generator_column(kZPattern[j], xy_char(flip(cols[j][2])),
                                       xy_char(flip(cols[j][3])));
    }
    // Both displays' product rows must evaluate to the shared binary table.
    for (Elem a = 0; ok && a < n; ++a)
        for (Elem b = 0; ok && b < n; ++b) {
            Elem p = at2(rec.x1, a, b), q = at2(rec.y1, a, b);
            Tuple args(12);
            for (std::size_t rq = 0; rq < 2 && ok; ++rq) {
                for (std::size_t j = 0; j < 12; ++j)
                    args[j] = cols[j][rq] == XY::X ? p : q;
                ok = ok && T.at(n, args) == dot(p, q);
            }
            for (std::size_t rq = 2; rq < 4 && ok; ++rq) {
                for (std::size_t j = 0; j < 12; ++j)
                    args[j] = cols[j][rq] == XY::X ? q : p;
                ok = ok && T.at(n, args) == dot(q, p);
            }
        }
    rec.displays_ok = ok;
    return rec;
}

IdempotencyClaim verify_idempotency_claim(const FiniteAlgebra& A,
                                          const OperationTable& dot,
                                          std::size_t cap) {
    A.validate();
    if (dot.arity != 2) throw Error("the claim needs a binary table");
    const int n = A.size;
    if (!check_shape(dot, n, Shape::Idempotent).ok)
        throw Error("the claim needs an idempotent table");

    IdempotencyClaim out;
    auto d2 = [&](Elem a, Elem b) {
        Tuple ab{a, b};
        return dot.at(n, ab);
    };
    out.x1 = make_table(n, 2, [&](std::span<const Elem> ab) {
        Elem p = d2(ab[0], ab[1]);
        return d2(d2(p, ab[0]), d2(ab[1], p));
    });
    out.y1 = make_table(n, 2, [&](std::span<const Elem> ab) {
        Elem p = d2(ab[1], ab[0]);
        return d2(d2(p, ab[1]), d2(ab[0], p));
    });
    auto at2 = [&](const OperationTable& op, Elem a, Elem b) {
        Tuple ab{a, b};
        return op.at(n, ab);
    };
    out.first = make_table(n, 2, [&](std::span<const Elem> ab) {
        Elem p = at2(out.x1, ab[0], ab[1]), q = at2(out.y1, ab[0], ab[1]);
        return d2(d2(q, p), d2(p, q));
    });
    out.second = out.x1;
    out.third = out.x1;

    const auto p2 = static_cast<std::size_t>(checked_pow(n, 2, 1ull << 20));
    const std::vector<Tuple> bproj = power_projections(n, 2);
    static constexpr const char* kCubeRows[3] = {"xyyyxx", "yxyxyx", "yyxxxy"};
    std::vector<Tuple> gens;
    gens.reserve(6);
    for (std::size_t m = 0; m < 6; ++m) {
        Tuple g;
        g.reserve(3 * p2);
        for (const char* row : kCubeRows) {
            const Tuple& block = bproj[row[m] == 'x' ? 0 : 1];
            g.insert(g.end(), block.begin(), block.end());
        }
        gens.push_back(std::move(g));
    }
    Tuple want = out.first.table;
    want.insert(want.end(), out.second.table.begin(), out.second.table.end());
    want.insert(want.end(), out.third.table.begin(), out.third.table.end());

    FiniteAlgebra B{n, {{"m", dot}}};
    ClosureOptions opts;
    opts.cap = cap;
    opts.target = [want](std::span<const Elem> e) {
        return std::equal(e.begin(), e.end(), want.begin(), want.end());
    };
    WitnessedClosure Q = generate_closure(B, 3 * p2, gens, opts);
    out.triple_in_closure = Q.target_hit.has_value();
    out.closure_size = Q.elements.size();
    return out;
}

}  // namespace malt
