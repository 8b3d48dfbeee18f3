#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "malt/algebra.hpp"
#include "malt/equations.hpp"
#include "malt/polymorphism.hpp"
#include "malt/term.hpp"

namespace malt {

// Decides whether some term operation of A satisfies a single-symbol system,
// by exhausting the witnessed closure of the matching clone slice. Found
// carries an explicit witness term over parameters x1..xk; None is a proof
// of absence, Budget means the closure hit the cap first.
struct TermSearch {
    SearchStatus status = SearchStatus::Budget;
    std::optional<TermDef> witness;
    std::size_t closure_size = 0;
};

TermSearch find_term_witness(TermPool& pool, const FiniteAlgebra& A, const EquationSystem& sys,
                             std::size_t cap = 1'000'000);

struct CountermodelOptions {
    int max_size = 2;             // exhaustive at size 2, sampled above
    std::size_t samples = 2000;   // random tables per size beyond 2
    std::uint64_t seed = 1;
    std::size_t closure_cap = 1'000'000;
};

struct CountermodelResult {
    SearchStatus status = SearchStatus::None;
    std::optional<FiniteAlgebra> algebra;
    std::uint64_t examined = 0;  // candidate algebras tested
};

// Searches for a finite idempotent algebra, with one basic operation per
// hypothesis symbol, that satisfies every hypothesis while no term operation
// satisfies the goal. Size-2 candidates enumerate every idempotent table
// (free cells ascending, row-major per symbol); larger sizes draw seeded
// samples. None is conclusive for the sizes it covered only when every
// candidate was enumerated and decided; otherwise the result is Budget.
CountermodelResult find_countermodel(TermPool& pool, const EquationSystem& hypotheses,
                                     const EquationSystem& goal,
                                     const CountermodelOptions& opts = {});

}  // namespace malt
