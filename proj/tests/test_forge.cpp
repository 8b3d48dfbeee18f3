#include <algorithm>

#include "doctest.h"
#include "malt/algebra.hpp"
#include "malt/closure.hpp"
#include "malt/equations.hpp"
#include "malt/error.hpp"
#include "malt/forge.hpp"
#include "malt/loops.hpp"
#include "malt/term.hpp"

using namespace malt;

namespace {

FiniteAlgebra xor3_algebra() {
    return {2, {{"xor3", make_table(2, 3, [](std::span<const Elem> a) {
                     return a[0] ^ a[1] ^ a[2];
                 })}}};
}

FiniteAlgebra maj_algebra() {
    return {2, {{"maj", make_table(2, 3, [](std::span<const Elem> a) {
                     return (a[0] & a[1]) | (a[0] & a[2]) | (a[1] & a[2]);
                 })}}};
}

// Median of three on the ordered universe {0, 1, 2}.
FiniteAlgebra median_algebra() {
    return {3, {{"med", make_table(3, 3, [](std::span<const Elem> a) {
                     int lo = std::min({a[0], a[1], a[2]});
                     int hi = std::max({a[0], a[1], a[2]});
                     return a[0] + a[1] + a[2] - lo - hi;
                 })}}};
}

bool holds(const FiniteAlgebra& A, const TermPool& pool, const EquationSystem& sys,
           const std::map<std::string, TermDef>& binding) {
    return satisfies(A, pool, sys, binding).ok;
}

TermDef projection12(TermPool& pool) {
    std::vector<std::string> names;
    for (int i = 1; i <= 12; ++i) names.push_back("z" + std::to_string(i));
    return {names, pool.variable("z1")};
}

}  // namespace

TEST_CASE("paired identities synthesized from the parity operation") {
    TermPool pool;
    FiniteAlgebra A = xor3_algebra();
    DoubleLoopForge f = double_loop_from_taylor(pool, A);
    CHECK(f.status == ForgeStatus::Found);
    CHECK(f.term.params.size() == 12);
    CHECK(f.binary_free_size == 2);  // parity terms reach only the two projections
    CHECK(f.closure_size >= 13);
    CHECK(f.rounds >= 1);
    CHECK(holds(A, pool, builtin_system(pool, "double_loop"), {{"d", f.term}}));
}

TEST_CASE("non-idempotent algebras are rejected up front") {
    TermPool pool;
    FiniteAlgebra bad{2, {{"flip", make_table(2, 2, [](std::span<const Elem> a) {
                               return 1 - a[0];
                           })}}};
    CHECK_THROWS_WITH_AS(double_loop_from_taylor(pool, bad),
                         "operation 'flip' is not idempotent", Error);
}

TEST_CASE("a projection algebra admits no paired-identity witness") {
    TermPool pool;
    FiniteAlgebra P{3, {{"first", make_table(3, 3, [](std::span<const Elem> a) {
                             return a[0];
                         })}}};
    DoubleLoopForge f = double_loop_from_taylor(pool, P);
    CHECK(f.status == ForgeStatus::NoWitness);
    CHECK(f.closure_size == 12);  // the generators close immediately
    CHECK(f.binary_free_size == 2);
    CHECK(std::string(to_string(f.status)) == "no-witness");
}

TEST_CASE("a tiny cap leaves the paired search inconclusive") {
    TermPool pool;
    DoubleLoopForge f = double_loop_from_taylor(pool, xor3_algebra(), 5);
    CHECK(f.status == ForgeStatus::Inconclusive);
}

TEST_CASE("strong composition chains the identities") {
    for (const FiniteAlgebra& A : {xor3_algebra(), maj_algebra()}) {
        TermPool pool;
        DoubleLoopForge f = double_loop_from_taylor(pool, A);
        REQUIRE(f.status == ForgeStatus::Found);
        TermDef strong = strong_from_double_loop(pool, f.term);
        CHECK(strong.params.size() == 12);
        CHECK(holds(A, pool, builtin_system(pool, "strong_double_loop"), {{"d", strong}}));
        CHECK(holds(A, pool, builtin_system(pool, "double_loop"), {{"d", strong}}));
    }
    TermPool pool;
    TermDef ternary{{"x", "y", "z"}, pool.variable("x")};
    CHECK_THROWS_AS(strong_from_double_loop(pool, ternary), Error);
}

TEST_CASE("terminator terms verify against both identity families") {
    for (const FiniteAlgebra& A : {xor3_algebra(), maj_algebra()}) {
        TermPool pool;
        DoubleLoopForge f = double_loop_from_taylor(pool, A);
        REQUIRE(f.status == ForgeStatus::Found);
        TermDef strong = strong_from_double_loop(pool, f.term);
        TerminatorTerms tt = terminator_from_strong(pool, strong);

        REQUIRE(tt.defs.size() == 7);
        CHECK(holds(A, pool, builtin_system(pool, "terminator"), tt.defs));
        CHECK(holds(A, pool, builtin_system(pool, "strong_terminator"), tt.defs));

        // The four-parameter intermediates tie the family together.
        Signature sig;
        sig.declare("q1", 4);
        sig.declare("q2", 4);
        sig.declare("c", 3);
        EquationSystem bridge;
        bridge.signature = sig;
        for (const char* text : {"(= (q1 x y x y) (q1 y x x y))",
                                 "(= (q1 y x x y) (q2 x y x y))",
                                 "(= (q2 x y x y) (q2 y x x y))",
                                 "(= (q1 x x y y) (c x y x))",
                                 "(= (q2 x x y y) (c y x x))"})
            bridge.equations.push_back(parse_equation(pool, text, sig));
        CHECK(holds(A, pool, bridge, {{"q1", tt.q1}, {"q2", tt.q2}, {"c", tt.c}}));
    }
    TermPool pool;
    TermDef ternary{{"x", "y", "z"}, pool.variable("x")};
    CHECK_THROWS_AS(terminator_from_strong(pool, ternary), Error);
    // The last two family members take their arguments in swapped order.
    FiniteAlgebra A = xor3_algebra();
    TermPool pool2;
    TerminatorTerms tt = terminator_from_strong(
        pool2, strong_from_double_loop(pool2, double_loop_from_taylor(pool2, A).term));
    CHECK(tt.defs.at("c21").params == std::vector<std::string>{"y", "x", "z"});
    CHECK(tt.defs.at("c22").params == std::vector<std::string>{"y", "x", "z"});
    CHECK(tt.defs.at("c11").params == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("cube witness synthesized from a strong term") {
    for (const FiniteAlgebra& A : {xor3_algebra(), maj_algebra()}) {
        TermPool pool;
        DoubleLoopForge f = double_loop_from_taylor(pool, A);
        REQUIRE(f.status == ForgeStatus::Found);
        TermDef strong = strong_from_double_loop(pool, f.term);
        WeakCubeForge wc = weak_3cube_from_strong(pool, A, strong);
        CHECK(wc.status == ForgeStatus::Found);
        CHECK(wc.term.params.size() == 6);
        CHECK(holds(A, pool, builtin_system(pool, "weak_3cube"), {{"t", wc.term}}));
    }
    TermPool pool;
    FiniteAlgebra A = xor3_algebra();
    CHECK_THROWS_AS(weak_3cube_from_strong(pool, A, projection12(pool)), Error);
}

TEST_CASE("cube recipe realizes the witness pointwise") {
    for (const FiniteAlgebra& A : {xor3_algebra(), maj_algebra()}) {
        TermPool pool;
        DoubleLoopForge f = double_loop_from_taylor(pool, A);
        REQUIRE(f.status == ForgeStatus::Found);
        TermDef strong = strong_from_double_loop(pool, f.term);
        CubeRecipe rec = weak_3cube_recipe(A, pool, strong);
        CHECK(rec.displays_ok);
        CHECK(rec.dot.arity == 2);
        CHECK(check_shape(rec.dot, A.size, Shape::Idempotent).ok);
        CHECK(rec.z.arity == 2);
        // The derived binary table supports the idempotency argument.
        IdempotencyClaim claim = verify_idempotency_claim(A, rec.dot);
        CHECK(claim.triple_in_closure);
    }
    TermPool pool;
    FiniteAlgebra A = xor3_algebra();
    CHECK_THROWS_AS(weak_3cube_recipe(A, pool, projection12(pool)), Error);
}

TEST_CASE("idempotency claim on the two projections") {
    FiniteAlgebra two{2, {}};
    OperationTable left = make_table(2, 2, [](std::span<const Elem> a) { return a[0]; });
    OperationTable right = make_table(2, 2, [](std::span<const Elem> a) { return a[1]; });

    IdempotencyClaim cl = verify_idempotency_claim(two, left);
    CHECK(cl.first.table == std::vector<Elem>{0, 1, 0, 1});
    CHECK(cl.second.table == std::vector<Elem>{0, 0, 1, 1});
    CHECK(cl.third.table == cl.second.table);
    CHECK(cl.triple_in_closure);
    CHECK(cl.closure_size == 6);  // the triple is already a generator

    IdempotencyClaim cr = verify_idempotency_claim(two, right);
    CHECK(cr.first.table == std::vector<Elem>{0, 0, 1, 1});
    CHECK(cr.second.table == std::vector<Elem>{0, 1, 0, 1});
    CHECK(cr.triple_in_closure);

    OperationTable flip = make_table(2, 2, [](std::span<const Elem> a) { return 1 - a[0]; });
    CHECK_THROWS_AS(verify_idempotency_claim(two, flip), Error);
    OperationTable maj = make_table(2, 3, [](std::span<const Elem> a) {
        return (a[0] & a[1]) | (a[0] & a[2]) | (a[1] & a[2]);
    });
    CHECK_THROWS_AS(verify_idempotency_claim(two, maj), Error);
}

TEST_CASE("six-variable witness from the majority operation") {
    TermPool pool;
    FiniteAlgebra A = maj_algebra();
    SiggersForge sf = siggers_from_nu(pool, A, "maj");
    CHECK(sf.free_size == 4);  // the monotone self-dual ternary functions
    CHECK(sf.pair_size >= 6);
    CHECK(sf.term.params.size() == 6);
    CHECK(holds(A, pool, builtin_system(pool, "siggers6"), {{"s", sf.term}}));
    CHECK(sf.digraph.is_symmetric());
    CHECK(sf.digraph.edge(sf.loop_vertex, sf.loop_vertex));
    audit_certificate(sf.digraph, sf.induced, sf.certificate);

    CHECK_THROWS_AS(siggers_from_nu(pool, A, "nope"), Error);
    FiniteAlgebra X = xor3_algebra();
    CHECK_THROWS_WITH_AS(siggers_from_nu(pool, X, "xor3"),
                         "operation 'xor3' is not near unanimity", Error);
}

TEST_CASE("six-variable witness from the median on a chain") {
    TermPool pool;
    FiniteAlgebra A = median_algebra();
    SiggersForge sf = siggers_from_nu(pool, A, "med");
    CHECK(sf.free_size == 4);  // the free median algebra on three generators
    CHECK(holds(A, pool, builtin_system(pool, "siggers6"), {{"s", sf.term}}));
    audit_certificate(sf.digraph, sf.induced, sf.certificate);
}

TEST_CASE("full pipeline over the three-element median") {
    TermPool pool;
    FiniteAlgebra A = median_algebra();
    DoubleLoopForge f = double_loop_from_taylor(pool, A);
    REQUIRE(f.status == ForgeStatus::Found);
    TermDef strong = strong_from_double_loop(pool, f.term);
    CHECK(holds(A, pool, builtin_system(pool, "strong_double_loop"), {{"d", strong}}));

    WeakCubeForge wc = weak_3cube_from_strong(pool, A, strong);
    CHECK(wc.status == ForgeStatus::Found);
    CHECK(holds(A, pool, builtin_system(pool, "weak_3cube"), {{"t", wc.term}}));

    TerminatorTerms tt = terminator_from_strong(pool, strong);
    CHECK(holds(A, pool, builtin_system(pool, "strong_terminator"), tt.defs));

    CubeRecipe rec = weak_3cube_recipe(A, pool, strong);
    CHECK(rec.displays_ok);
    CHECK(verify_idempotency_claim(A, rec.dot).triple_in_closure);
}
