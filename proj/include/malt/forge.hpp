#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "malt/algebra.hpp"
#include "malt/closure.hpp"
#include "malt/equations.hpp"
#include "malt/loops.hpp"
#include "malt/term.hpp"

namespace malt {

// Outcome of a witness search over a generated subpower.  NoWitness means the
// search space was exhausted: the algebra satisfies no term of the requested
// kind, so (for an idempotent algebra) every term operation factors through a
// projection on the probed identities.
enum class ForgeStatus { Found, NoWitness, Inconclusive };

const char* to_string(ForgeStatus s);

// Six-variable Siggers term built from a near-unanimity operation.  The
// construction walks the free algebra on three generators inside A^(|A|^3),
// closes the six mixed generator pairs into a symmetric digraph on it, and
// reads the term out of a constructively found loop.
struct SiggersForge {
    TermDef term;                 // parameters x1..x6, satisfies the Siggers identity
    std::size_t free_size = 0;    // vertices of the pair digraph
    std::size_t pair_size = 0;    // edges of the pair digraph
    Elem loop_vertex = 0;         // vertex whose doubled tuple yields the term
    Relation digraph;             // the pair subalgebra, indexed over the free algebra
    OperationTable induced;       // the operation acting on free-algebra indices
    LoopCertificate certificate;  // transcript of the loop search, auditable
};

SiggersForge siggers_from_nu(TermPool& pool, const FiniteAlgebra& A,
                             const std::string& op_name);

// Twelve-variable term satisfying the paired six-point identities, found by
// closing the twelve column generators inside A^(4*|A|^2) and stopping at the
// first element whose blocks agree pairwise.
struct DoubleLoopForge {
    ForgeStatus status = ForgeStatus::Inconclusive;
    TermDef term;                       // parameters z1..z12 when status == Found
    std::size_t closure_size = 0;       // elements generated before stopping
    std::size_t rounds = 0;
    std::size_t binary_free_size = 0;   // free algebra on two generators, for scale
};

DoubleLoopForge double_loop_from_taylor(TermPool& pool, const FiniteAlgebra& A,
                                        std::size_t cap = 1'000'000);

// Composes d with itself three levels deep, rerouting every leaf through the
// column arithmetic so the chained (strong) form of the identities holds.
TermDef strong_from_double_loop(TermPool& pool, const TermDef& d);

// Terms derived from a strong twelve-variable witness t: the 4-ary pair
// q1, q2, the ternary c, and the seven-term family keyed c, c1, c2, c11,
// c12, c21, c22 whose bodies are fully expanded over the base operations.
struct TerminatorTerms {
    TermDef q1, q2, c;
    std::map<std::string, TermDef> defs;
};

TerminatorTerms terminator_from_strong(TermPool& pool, const TermDef& t);

// Six-variable cube-style witness from a strong twelve-variable term,
// obtained by closing the six mixed triples under the evaluated term and
// stopping at a constant triple.
struct WeakCubeForge {
    ForgeStatus status = ForgeStatus::Inconclusive;
    TermDef term;                  // parameters x1..x6 when status == Found
    std::size_t closure_size = 0;
    std::size_t rounds = 0;
};

WeakCubeForge weak_3cube_from_strong(TermPool& pool, const FiniteAlgebra& A,
                                     const TermDef& strong, std::size_t cap = 1'000'000);

// Concrete two-variable tables realizing the cube witness over A: the common
// binary operation of the four chained rows, the derived points x1, y1, x2,
// y2, and the resulting z, together with checks that the two membership
// displays evaluate and line up column by column.
struct CubeRecipe {
    OperationTable dot;            // shared table of all four row patterns
    OperationTable x1, y1, x2, y2; // derived two-variable tables
    OperationTable z;
    bool displays_ok = false;
};

CubeRecipe weak_3cube_recipe(const FiniteAlgebra& A, const TermPool& pool,
                             const TermDef& strong);

// For an idempotent binary table, checks that the triple
// ((y1 x1)(x1 y1), x1, x1) lies in the subalgebra of cube triples, which is
// the step letting the cube witness assume idempotency.
struct IdempotencyClaim {
    OperationTable x1, y1;
    OperationTable first, second, third;  // the member triple, as tables
    bool triple_in_closure = false;
    std::size_t closure_size = 0;
};

IdempotencyClaim verify_idempotency_claim(const FiniteAlgebra& A,
                                          const OperationTable& dot,
                                          std::size_t cap = 1'000'000);

}  // namespace malt
