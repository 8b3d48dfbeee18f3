#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "malt/algebra.hpp"
#include "malt/term.hpp"

namespace malt {

// How a closure element was produced: an operation applied coordinatewise
// to previously discovered elements (indices into the element list).
struct Derivation {
    std::string op;
    std::vector<std::uint32_t> children;
};

// Subpower closure with a derivation witness per element.
//
// Round discipline (frozen; tests rely on it):
//   - generators come first, deduplicated, in the order given
//   - each round applies the selected operations in name order to child
//     index tuples in lexicographic order, keeping only candidates with at
//     least one child from the previous round's additions; the first
//     derivation found for a tuple wins
//   - a round's new tuples are sorted lexicographically before appending
//   - the target predicate is scanned over each round's additions (and the
//     generators) in appended order; a hit stops the run after that round
//   - a fixpoint sets `complete`; exceeding the element cap stops the run
//     with `complete == false` and no error
struct WitnessedClosure {
    int universe = 0;
    std::size_t power = 0;
    std::vector<Tuple> elements;
    std::vector<std::optional<Derivation>> how;
    std::size_t generator_count = 0;
    bool complete = false;
    std::size_t rounds = 0;
    std::optional<std::size_t> target_hit;

    std::optional<std::size_t> index_of(const Tuple& t) const;
};

enum class ClosureStrategy {
    Auto,     // naive when the candidate space is small, curried otherwise
    Naive,    // enumerate child index tuples directly
    Curried,  // layer-by-layer partial evaluation of the operation table
};

struct ClosureOptions {
    std::size_t cap = 1'000'000;
    std::function<bool(std::span<const Elem>)> target;
    std::vector<std::string> op_names;  // empty means every operation
    ClosureStrategy strategy = ClosureStrategy::Auto;
};

WitnessedClosure generate_closure(const FiniteAlgebra& A, std::size_t power,
                                  const std::vector<Tuple>& generators,
                                  const ClosureOptions& opts = {});

// Rebuilds the term that derives elements[index]; generators become
// variables named g1, g2, ... unless explicit names are supplied.
TermId extract_witness(TermPool& pool, const WitnessedClosure& wc, std::size_t index,
                       const std::vector<std::string>& generator_names = {});

// Recomputes elements[index] from its recorded derivation (one step).
Tuple replay(const FiniteAlgebra& A, const WitnessedClosure& wc, std::size_t index);

// Audits every element: derivations recompute, generators are in range,
// no duplicates.
bool replay_ok(const FiniteAlgebra& A, const WitnessedClosure& wc);

// The `arity` projection tuples of length universe^arity, row-major.
std::vector<Tuple> power_projections(int universe, std::size_t arity);

// Closure of the projections inside A^(A^arity): every element is the
// value table of an arity-ary term operation of A.
WitnessedClosure term_clone_slice(const FiniteAlgebra& A, std::size_t arity,
                                  const ClosureOptions& opts = {});

// Same universe, operations replaced by the value tables of the given
// term definitions.
FiniteAlgebra induced_algebra(const FiniteAlgebra& A, const TermPool& pool,
                              const std::map<std::string, TermDef>& defs);

}  // namespace malt
