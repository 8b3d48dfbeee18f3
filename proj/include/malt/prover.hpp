#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "malt/equations.hpp"
#include "malt/term.hpp"

namespace malt {

enum class ProofStatus { Proved, Unknown };

const char* to_string(ProofStatus s);

struct ProverBudget {
    std::size_t max_nodes = 200'000;
    std::size_t max_instances = 2'000'000;
};

struct ProofReport {
    ProofStatus status = ProofStatus::Unknown;
    int depth_used = 0;           // instantiation rounds consumed
    std::size_t universe = 0;     // distinct subterms tracked at the end
    std::size_t instances = 0;    // axiom instances asserted
    bool budget_exhausted = false;
    // Sizes of the congruence classes that actually merged anything
    // (two members or more), largest first.
    std::vector<std::size_t> merged_class_sizes;
};

// Ground congruence-closure prover. The goal's variables are frozen as
// constants; each round instantiates every axiom with every tuple of subterms
// present before the round started (last variable fastest), then congruence
// closure runs to fixpoint and the goal is rechecked. Sound but incomplete:
// Proved means the goal follows from the axioms in equational logic, Unknown
// means the search gave up at this depth or budget.
ProofReport cc_prove(TermPool& pool, const EquationSystem& axioms, const Equation& goal,
                     int depth, const ProverBudget& budget = {});

struct SuiteCheck {
    std::string suite;  // "collapse", "pair" or "terminator"
    std::string goal;
    ProofStatus status = ProofStatus::Unknown;
    int depth = 0;
};

struct AblationCheck {
    std::string goal;
    ProofStatus with_idempotency = ProofStatus::Unknown;
    ProofStatus without_idempotency = ProofStatus::Unknown;
};

struct SuiteReport {
    std::vector<SuiteCheck> checks;
    bool all_proved = false;
    std::vector<AblationCheck> ablation;
    bool ablation_exact = false;
};

// Machine-checks the derivation chain behind the term constructions:
//   collapse    the four x/y row instantiations of the composed 12-ary term
//               all coincide under the paired identities plus idempotency;
//   pair        the two 4-ary intermediates bridge the chained identities
//               to the ternary core;
//   terminator  all eleven equations of the seven-term family follow from
//               the five bridge equations alone.
// The ablation reruns the collapse goals without idempotency; exactly the
// two adjacent-row goals that never needed it must survive.
SuiteReport verify_derivation_suite(TermPool& pool);

// The four row instantiations compared by the collapse suite, as definitions
// over parameters x, y applying a single opaque 12-ary symbol "d".
std::vector<TermDef> collapse_row_terms(TermPool& pool);

}  // namespace malt
