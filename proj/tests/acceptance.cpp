// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero when any of them fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "malt/algebra.hpp"
#include "malt/closure.hpp"
#include "malt/countermodel.hpp"
#include "malt/equations.hpp"
#include "malt/error.hpp"
#include "malt/forge.hpp"
#include "malt/loops.hpp"
#include "malt/polymorphism.hpp"
#include "malt/prover.hpp"
#include "malt/term.hpp"

using namespace malt;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (detail.empty()) detail = why;  // keep the first failure readable
    }
    void require(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

FiniteAlgebra xor3_algebra() {
    FiniteAlgebra A{2, {}};
    A.ops["xor3"] = OperationTable{3, Tuple{0, 1, 1, 0, 1, 0, 0, 1}};
    return A;
}

FiniteAlgebra maj_algebra() {
    FiniteAlgebra A{2, {}};
    A.ops["maj"] = OperationTable{3, Tuple{0, 0, 0, 1, 0, 1, 1, 1}};
    return A;
}

// Majority when the last two arguments agree, first argument otherwise.
// A near-unanimity operation on every universe.
OperationTable dual_discriminator(int n) {
    return make_table(n, 3, [](std::span<const Elem> a) {
        return a[1] == a[2] ? a[1] : a[0];
    });
}

// The mirror tie-break: agreement of the first two wins, else the third.
OperationTable dual_discriminator_mirror(int n) {
    return make_table(n, 3, [](std::span<const Elem> a) {
        return a[0] == a[1] ? a[1] : a[2];
    });
}

// Random symmetric seed containing a triangle, closed under op inside A^2.
// The result is the smallest op-compatible symmetric relation containing
// the seed.
Relation seeded_closure_instance(std::mt19937_64& rng, int n, const OperationTable& op) {
    std::vector<Tuple> seeds;
    const auto add_sym = [&](Elem a, Elem b) {
        seeds.push_back({a, b});
        seeds.push_back({b, a});
    };
    const Elem a = static_cast<Elem>(rng() % n);
    Elem b = a, c = a;
    while (b == a) b = static_cast<Elem>(rng() % n);
    while (c == a || c == b) c = static_cast<Elem>(rng() % n);
    add_sym(a, b);
    add_sym(b, c);
    add_sym(c, a);
    const std::size_t extra = rng() % (2 * n);
    for (std::size_t i = 0; i < extra; ++i) {
        const Elem u = static_cast<Elem>(rng() % n);
        Elem v = u;
        while (v == u) v = static_cast<Elem>(rng() % n);
        add_sym(u, v);
    }
    FiniteAlgebra A{n, {}};
    A.ops["op"] = op;
    ClosureOptions opts;
    opts.cap = 200'000;
    const WitnessedClosure wc = generate_closure(A, 2, seeds, opts);
    Relation R = Relation::empty(n, 2);
    for (const Tuple& t : wc.elements) R.add(t);
    return R;
}

// ---------------------------------------------------------------------------

// Criterion 1: the catalog classifies as expected, with verified projection
// witnesses on the trivial side, under one second per system.
Verdict criterion1() {
    Verdict v;
    TermPool pool;

    const auto projection_witness_ok = [&](const EquationSystem& sys,
                                           const ProjectionAssignment& w) {
        const std::function<TermId(TermId)> proj = [&](TermId t) -> TermId {
            if (pool.is_variable(t)) return t;
            const auto it = w.choice.find(std::string(pool.head(t)));
            if (it == w.choice.end()) return t;  // unmapped symbol: fails below
            return proj(pool.args(t)[it->second]);
        };
        for (const Equation& eq : sys.equations)
            if (proj(eq.lhs) != proj(eq.rhs)) return false;
        return true;
    };

    const std::vector<std::pair<std::string, int>> nontrivial = {
        {"maltsev", 0},     {"siggers6", 0},          {"siggers4", 0},
        {"wnu", 3},         {"cyclic", 3},            {"double_loop", 0},
        {"strong_double_loop", 0}, {"weak_3cube", 0}, {"terminator", 0},
        {"strong_terminator", 0},  {"weak_3edge", 0}};
    for (const auto& [name, param] : nontrivial) {
        const auto t0 = Clock::now();
        const auto w = check_trivial(pool, builtin_system(pool, name, param));
        const double dt = seconds_since(t0);
        v.require(!w.has_value(), name + " misclassified as trivial");
        v.require(dt < 1.0, name + " exceeded one second");
    }

    const std::vector<std::pair<std::string, int>> trivial = {
        {"associativity", 0}, {"idempotency", 1}, {"idempotency", 2}, {"idempotency", 3}};
    for (const auto& [name, param] : trivial) {
        const auto t0 = Clock::now();
        const EquationSystem sys = builtin_system(pool, name, param);
        const auto w = check_trivial(pool, sys);
        const double dt = seconds_since(t0);
        v.require(w.has_value(), name + " misclassified as nontrivial");
        if (w) v.require(projection_witness_ok(sys, *w), name + ": witness does not check out");
        v.require(dt < 1.0, name + " exceeded one second");
    }
    return v;
}

// Criterion 2: 200 seeded near-unanimity closures; the constructive search
// returns a membership-verified loop with a strictly decreasing recursion
// measure, agreeing with the brute-force existence check, median under 1 s.
Verdict criterion2() {
    Verdict v;
    std::mt19937_64 rng(271828);
    std::vector<double> times;
    for (int i = 0; i < 200 && v.ok; ++i) {
        const int n = 3 + static_cast<int>(rng() % 5);  // universes of size 3..7
        const OperationTable op =
            (i % 2 == 0) ? dual_discriminator(n) : dual_discriminator_mirror(n);
        const Relation R = seeded_closure_instance(rng, n, op);
        const std::string tag = "instance " + std::to_string(i);

        const bool brute = find_any_loop(R).has_value();
        const auto t0 = Clock::now();
        LoopCertificate cert;
        try {
            cert = find_loop(R, op, LoopMode::NearUnanimity);
        } catch (const Error& e) {
            v.fail(tag + ": " + e.what());
            break;
        }
        times.push_back(seconds_since(t0));

        v.require(R.edge(cert.loop, cert.loop), tag + ": result is not a loop of R");
        v.require(brute, tag + ": brute-force scan disagrees on existence");
        for (std::size_t fi = 0; fi < cert.frames.size() && v.ok; ++fi) {
            const LoopFrame& f = cert.frames[fi];
            if (f.parent < 0) continue;
            const LoopFrame& p = cert.frames[static_cast<std::size_t>(f.parent)];
            const bool drops =
                f.g_arity < p.g_arity || (f.g_arity == p.g_arity && f.l < p.l);
            v.require(drops, tag + ": frame " + std::to_string(fi) +
                                 " does not decrease the measure");
        }
    }
    if (v.ok) {
        v.require(times.size() == 200, "generator stopped early");
        std::sort(times.begin(), times.end());
        v.require(times[times.size() / 2] < 1.0, "median instance time exceeded one second");
    }
    return v;
}

// Criterion 3: six-variable term over the majority clone, checked on all
// eight triples, in under ten seconds.
Verdict criterion3() {
    Verdict v;
    const auto t0 = Clock::now();
    TermPool pool;
    const FiniteAlgebra A = maj_algebra();
    try {
        const SiggersForge forge = siggers_from_nu(pool, A, "maj");
        v.require(forge.term.params.size() == 6, "term is not six-ary");

        const std::function<bool(TermId)> over_maj = [&](TermId t) -> bool {
            if (pool.is_variable(t)) return true;
            if (pool.head(t) != "maj") return false;
            for (const TermId arg : pool.args(t))
                if (!over_maj(arg)) return false;
            return true;
        };
        v.require(over_maj(forge.term.body), "term leaves the {maj} clone");

        for (Elem x = 0; x < 2 && v.ok; ++x)
            for (Elem y = 0; y < 2; ++y)
                for (Elem z = 0; z < 2; ++z) {
                    const auto& p = forge.term.params;
                    const std::map<std::string, Elem> left = {{p[0], x}, {p[1], y}, {p[2], x},
                                                              {p[3], z}, {p[4], y}, {p[5], z}};
                    const std::map<std::string, Elem> right = {{p[0], y}, {p[1], x}, {p[2], z},
                                                               {p[3], x}, {p[4], z}, {p[5], y}};
                    if (eval_term_at(A, pool, forge.term.body, {}, left) !=
                        eval_term_at(A, pool, forge.term.body, {}, right)) {
                        v.fail("identity fails at (" + std::to_string(x) + "," +
                               std::to_string(y) + "," + std::to_string(z) + ")");
                        break;
                    }
                }
        v.require(satisfies(A, pool, builtin_system(pool, "siggers6"), {{"s", forge.term}}).ok,
                  "system-level verification failed");
    } catch (const Error& e) {
        v.fail(e.what());
    }
    v.require(seconds_since(t0) < 10.0, "exceeded ten seconds");
    return v;
}

// Criterion 4: verified 12-ary paired terms for the xor and majority
// algebras; the three-element projection algebra is certified as having
// no such term. Under a minute per algebra.
Verdict criterion4() {
    Verdict v;
    TermPool pool;
    const std::vector<std::pair<std::string, FiniteAlgebra>> carriers = {
        {"xor3", xor3_algebra()}, {"maj", maj_algebra()}};
    for (const auto& [label, A] : carriers) {
        const auto t0 = Clock::now();
        const DoubleLoopForge forge = double_loop_from_taylor(pool, A);
        v.require(forge.status == ForgeStatus::Found, label + ": no term found");
        if (forge.status == ForgeStatus::Found) {
            v.require(forge.term.params.size() == 12, label + ": term is not 12-ary");
            v.require(
                satisfies(A, pool, builtin_system(pool, "double_loop"), {{"d", forge.term}}).ok,
                label + ": paired identities fail");
        }
        v.require(seconds_since(t0) < 60.0, label + ": exceeded one minute");
    }

    FiniteAlgebra P{3, {}};
    P.ops["p1"] = make_table(3, 3, [](std::span<const Elem> a) { return a[0]; });
    const auto t0 = Clock::now();
    const DoubleLoopForge none = double_loop_from_taylor(pool, P);
    v.require(none.status == ForgeStatus::NoWitness,
              std::string("projection algebra: expected a certified negative, got ") +
                  to_string(none.status));
    v.require(!is_taylor_operation(P.ops.at("p1"), 3).system.has_value(),
              "projection operation passes the operation-level test");
    v.require(seconds_since(t0) < 60.0, "projection algebra: exceeded one minute");
    return v;
}

// Criterion 5: downstream of criterion 4's terms: chained form with an
// exact column report, cube witness, and the q/c family, all verified
// exhaustively on the source algebras, within two minutes total.
Verdict criterion5() {
    Verdict v;
    const auto t0 = Clock::now();
    TermPool pool;

    // Column report of the chained system: the twelve argument positions
    // carry exactly the twelve non-forbidden 4-entry columns.
    const EquationSystem strong_sys = builtin_system(pool, "strong_double_loop");
    std::vector<std::vector<TermId>> rows;
    for (std::size_t e = 0; e < strong_sys.equations.size(); ++e) {
        const Equation& eq = strong_sys.equations[e];
        const auto args_of = [&](TermId t) {
            const auto args = pool.args(t);
            return std::vector<TermId>(args.begin(), args.end());
        };
        if (e == 0) rows.push_back(args_of(eq.lhs));
        else v.require(args_of(eq.lhs) == rows.back(), "equations do not chain");
        rows.push_back(args_of(eq.rhs));
    }
    v.require(rows.size() == 4, "chained system does not have four rows");
    if (rows.size() == 4) {
        std::set<int> seen;
        for (std::size_t j = 0; j < 12; ++j) {
            Column col;
            for (std::size_t r = 0; r < 4; ++r)
                col[r] = pool.var_name(rows[r][j]) == "x" ? XY::X : XY::Y;
            const int slot = double_loop_slot(col);
            v.require(slot != 0, "column " + std::to_string(j + 1) + " is forbidden");
            seen.insert(slot);
        }
        v.require(seen.size() == 12, "column report is not exact");
        for (int s = 1; s <= 12; ++s)
            v.require(seen.count(s) == 1, "slot " + std::to_string(s) + " missing");
    }

    // The five defining identities of the q/c pair, over the symbols alone.
    Signature bridge_sig;
    bridge_sig.declare("q1", 4);
    bridge_sig.declare("q2", 4);
    bridge_sig.declare("c", 3);
    EquationSystem bridge;
    bridge.signature = bridge_sig;
    for (const char* text : {"(= (q1 x y x y) (q1 y x x y))", "(= (q1 y x x y) (q2 x y x y))",
                             "(= (q2 x y x y) (q2 y x x y))", "(= (q1 x x y y) (c x y x))",
                             "(= (q2 x x y y) (c y x x))"})
        bridge.equations.push_back(parse_equation(pool, text, bridge_sig));

    const std::vector<std::pair<std::string, FiniteAlgebra>> carriers = {
        {"xor3", xor3_algebra()}, {"maj", maj_algebra()}};
    for (const auto& [label, A] : carriers) {
        const DoubleLoopForge dl = double_loop_from_taylor(pool, A);
        if (dl.status != ForgeStatus::Found) {
            v.fail(label + ": upstream term missing");
            continue;
        }
        const TermDef strong = strong_from_double_loop(pool, dl.term);
        v.require(satisfies(A, pool, strong_sys, {{"d", strong}}).ok,
                  label + ": chained identities fail");

        const WeakCubeForge cube = weak_3cube_from_strong(pool, A, strong);
        v.require(cube.status == ForgeStatus::Found, label + ": no cube witness");
        if (cube.status == ForgeStatus::Found)
            v.require(
                satisfies(A, pool, builtin_system(pool, "weak_3cube"), {{"t", cube.term}}).ok,
                label + ": cube identities fail");

        const TerminatorTerms tt = terminator_from_strong(pool, strong);
        v.require(satisfies(A, pool, bridge,
                            {{"q1", tt.q1}, {"q2", tt.q2}, {"c", tt.c}})
                      .ok,
                  label + ": q/c identities fail");
        v.require(satisfies(A, pool, builtin_system(pool, "strong_terminator"), tt.defs).ok,
                  label + ": strengthened family fails");
    }
    v.require(seconds_since(t0) < 120.0, "exceeded two minutes");
    return v;
}

// Criterion 6: the symbolic suite proves every goal within depth two, and
// dropping idempotency breaks exactly the goals that rely on it. Under
// ten seconds.
Verdict criterion6() {
    Verdict v;
    const auto t0 = Clock::now();
    TermPool pool;
    const SuiteReport rep = verify_derivation_suite(pool);
    v.require(rep.all_proved, "a goal was not proved");
    for (const SuiteCheck& c : rep.checks)
        v.require(c.depth <= 2, c.suite + "/" + c.goal + " needed depth beyond two");
    v.require(rep.ablation_exact, "ablation did not isolate the idempotency-dependent goals");
    v.require(seconds_since(t0) < 10.0, "exceeded ten seconds");
    return v;
}

// Criterion 7: exhaustive conjecture sweep on up to three vertices, a
// fixed-seed thousand-digraph sample at four, no counterexamples and few
// inconclusive searches, inside ten minutes.
Verdict criterion7() {
    Verdict v;
    const auto t0 = Clock::now();
    ConjectureOptions small;
    small.max_vertices = 3;
    small.exhaustive = true;
    small.query.arity = 3;
    small.query.idempotent = true;
    small.query.near_unanimity = true;
    const ConjectureReport r3 = check_loop_conjecture(small);
    v.require(r3.counterexamples.empty(),
              std::to_string(r3.counterexamples.size()) + " counterexamples on <= 3 vertices");
    v.require(r3.inconclusive == 0, "exhaustive sweep was not conclusive");

    ConjectureOptions sampled = small;
    sampled.max_vertices = 4;
    sampled.exhaustive = false;
    sampled.samples = 1000;
    sampled.seed = 2026;
    const ConjectureReport r4 = check_loop_conjecture(sampled);
    v.require(r4.counterexamples.empty(),
              std::to_string(r4.counterexamples.size()) + " counterexamples at 4 vertices");
    v.require(r4.candidates > 0, "no sampled digraph passed the structural filter");
    v.require(r4.inconclusive * 20 <= r4.candidates,
              "more than 5% inconclusive: " + std::to_string(r4.inconclusive) + "/" +
                  std::to_string(r4.candidates));
    v.require(seconds_since(t0) < 600.0, "exceeded ten minutes");
    return v;
}

// Criterion 8: the two decision procedures agree exactly with brute-force
// oracles: covering-system search on all 256 ternary operations over {0,1},
// and the walk classifier on all digraphs with up to four vertices.
Verdict criterion8() {
    Verdict v;

    // Oracle (a): enumerate candidate two-variable rows per coordinate.
    const auto pattern_value = [](const OperationTable& op, int pat, Elem x, Elem y) {
        Tuple args(3);
        for (int k = 0; k < 3; ++k) args[k] = ((pat >> k) & 1) ? y : x;
        return op.at(2, args);
    };
    const auto idempotent_oracle = [](const OperationTable& op) {
        for (Elem x = 0; x < 2; ++x) {
            const Tuple diag(3, x);
            if (op.at(2, diag) != x) return false;
        }
        return true;
    };
    const auto taylor_oracle = [&](const OperationTable& op) {
        for (int coord = 0; coord < 3; ++coord) {
            bool covered = false;
            for (int p = 0; p < 8 && !covered; ++p)
                for (int q = 0; q < 8 && !covered; ++q) {
                    if (((p >> coord) & 1) == ((q >> coord) & 1)) continue;
                    bool equal = true;
                    for (Elem x = 0; x < 2 && equal; ++x)
                        for (Elem y = 0; y < 2 && equal; ++y)
                            equal = pattern_value(op, p, x, y) == pattern_value(op, q, x, y);
                    covered = equal;
                }
            if (!covered) return false;
        }
        return true;
    };
    for (int code = 0; code < 256 && v.ok; ++code) {
        OperationTable op{3, Tuple(8, 0)};
        for (int j = 0; j < 8; ++j) op.table[j] = static_cast<Elem>((code >> j) & 1);
        const TaylorOperationReport rep = is_taylor_operation(op, 2);
        v.require(rep.system.has_value() == taylor_oracle(op),
                  "operation " + std::to_string(code) + ": decision and oracle disagree");
        v.require(rep.idempotent == idempotent_oracle(op),
                  "operation " + std::to_string(code) + ": idempotence flags disagree");
    }

    // Oracle (b): walk enumeration over states (vertex, imbalance mod 210).
    // Any nonzero net imbalance of a closed walk on <= 4 vertices has a
    // generator bounded by 9 in absolute value, and 210 = 2*3*5*7 shares a
    // factor with every candidate gcd except one, so net one (mod 210) is
    // reachable exactly when some closed walk has net exactly one.
    constexpr int kMod = 210;
    const auto walk_oracle = [&](const Relation& R) {
        const int n = R.universe;
        for (Elem s = 0; s < n; ++s) {
            std::vector<char> seen(static_cast<std::size_t>(n) * kMod, 0);
            std::deque<std::pair<Elem, int>> queue;
            seen[s * kMod] = 1;
            queue.emplace_back(s, 0);
            while (!queue.empty()) {
                const auto [vtx, bal] = queue.front();
                queue.pop_front();
                const auto push = [&](Elem w, int nb) {
                    if (!seen[w * kMod + nb]) {
                        seen[w * kMod + nb] = 1;
                        queue.emplace_back(w, nb);
                    }
                };
                for (const Elem w : R.out_neighbors(vtx)) push(w, (bal + 1) % kMod);
                for (const Elem w : R.in_neighbors(vtx)) push(w, (bal + kMod - 1) % kMod);
            }
            if (seen[s * kMod + 1]) return true;
        }
        return false;
    };
    for (int n = 1; n <= 4 && v.ok; ++n) {
        const std::uint64_t masks = 1ull << (n * n);
        for (std::uint64_t mask = 0; mask < masks; ++mask) {
            const Relation R = relation_from_mask(n, mask);
            if (classify_digraph(R).algebraic_length_one != walk_oracle(R)) {
                v.fail("digraph n=" + std::to_string(n) + " mask=" + std::to_string(mask) +
                       ": classifier and oracle disagree");
                break;
            }
        }
    }
    return v;
}

// Criterion 9: on seeded near-unanimity closures both absorption reports
// hold, and the derived near-unanimity completion keeps its shape and
// compatibility.
Verdict criterion9() {
    Verdict v;
    std::mt19937_64 rng(314159);
    for (int i = 0; i < 100 && v.ok; ++i) {
        const int n = 3 + static_cast<int>(rng() % 5);
        const OperationTable op =
            (i % 2 == 0) ? dual_discriminator(n) : dual_discriminator_mirror(n);
        const Relation R = seeded_closure_instance(rng, n, op);
        const std::string tag = "instance " + std::to_string(i);
        try {
            v.require(semiabsorption_report(R, op).ok, tag + ": semiabsorption fails");
            v.require(produces_enough_absorption(R, op).ok, tag + ": absorption fails");
            const OperationTable nu = nu_from_semiabsorbing(op, n);
            v.require(check_shape(nu, n, Shape::NearUnanimity).ok,
                      tag + ": completion lost the near-unanimity shape");
            v.require(compatible(nu, R).ok, tag + ": completion lost compatibility");
        } catch (const Error& e) {
            v.fail(tag + ": " + e.what());
        }
    }
    return v;
}

// Criterion 10: the exhaustive two-element search separates the ternary
// conditions exactly as expected, in under ten seconds.
Verdict criterion10() {
    Verdict v;
    const auto t0 = Clock::now();
    TermPool pool;
    const EquationSystem maltsev = builtin_system(pool, "maltsev");

    Signature nu_sig;
    nu_sig.declare("t", 3);
    EquationSystem nu3;
    nu3.signature = nu_sig;
    for (const char* text : {"(= (t y x x) x)", "(= (t x y x) x)", "(= (t x x y) x)"})
        nu3.equations.push_back(parse_equation(pool, text, nu_sig));

    const CountermodelResult found = find_countermodel(pool, maltsev, nu3, {});
    v.require(found.status == SearchStatus::Found, "no separating algebra found");
    if (found.status == SearchStatus::Found) {
        v.require(found.algebra->size == 2, "separating algebra is not two-element");
        const auto it = found.algebra->ops.begin();
        v.require(it != found.algebra->ops.end() &&
                      it->second.table == Tuple{0, 1, 1, 0, 1, 0, 0, 1},
                  "separating operation is not the ternary xor");
    }

    const EquationSystem wnu3 = builtin_system(pool, "wnu", 3);
    const CountermodelResult none = find_countermodel(pool, maltsev, wnu3, {});
    v.require(none.status == SearchStatus::None,
              "weak shape goal unexpectedly separated (or search was inconclusive)");
    v.require(seconds_since(t0) < 10.0, "exceeded ten seconds");
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, Verdict (*)()>> criteria = {
        {"triviality classification of the catalog", criterion1},
        {"constructive loops on 200 seeded closures", criterion2},
        {"six-variable synthesis from majority", criterion3},
        {"paired-term synthesis and certified negative", criterion4},
        {"downstream chain, cube, and q/c family", criterion5},
        {"symbolic derivation suite with ablation", criterion6},
        {"loop conjecture sweep (exhaustive <= 3, sampled 4)", criterion7},
        {"decision procedures match brute-force oracles", criterion8},
        {"absorption reports on seeded instances", criterion9},
        {"two-element separation of ternary conditions", criterion10},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.ok = false;
            v.detail = std::string("unhandled exception: ") + e.what();
        }
        const double dt = seconds_since(t0);
        std::printf("%s  criterion %2zu: %s (%.2fs)%s%s\n", v.ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), dt, v.detail.empty() ? "" : " -- ",
                    v.detail.c_str());
        std::fflush(stdout);
        if (!v.ok) ++failures;
    }
    return failures > 0 ? 1 : 0;
}
