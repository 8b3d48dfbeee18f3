#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "malt/equations.hpp"
#include "malt/term.hpp"

namespace malt {

using Elem = std::uint16_t;
using Tuple = std::vector<Elem>;

// n^k with an overflow/cap guard.
std::uint64_t checked_pow(int n, int k, std::uint64_t cap);

// Finite operation as a flat row-major table: the entry for arguments
// (a1,..,ak) over a universe of size n sits at sum a_i * n^(k-1-i).
// Row-major layout means fixing a prefix of arguments selects a contiguous
// slice, which the closure engine relies on.
struct OperationTable {
    int arity = 0;
    std::vector<Elem> table;

    static std::size_t index(int n, int arity, std::span<const Elem> args);
    Elem at(int n, std::span<const Elem> args) const;
};

struct FiniteAlgebra {
    int size = 0;
    std::map<std::string, OperationTable> ops;

    void validate() const;  // throws Error on malformed tables
};

// Convenience builder used all over the tests: fills the table of an
// arity-k operation from a callback on argument tuples (lex order).
template <typename F>
OperationTable make_table(int n, int arity, F&& fn) {
    OperationTable op;
    op.arity = arity;
    std::uint64_t cells = checked_pow(n, arity, 1ull << 27);
    op.table.resize(cells);
    Tuple args(static_cast<std::size_t>(arity), 0);
    for (std::uint64_t i = 0; i < cells; ++i) {
        op.table[i] = static_cast<Elem>(fn(std::span<const Elem>(args)));
        for (std::size_t j = args.size(); j-- > 0;) {
            if (++args[j] < n) break;
            args[j] = 0;
        }
    }
    return op;
}

// Subsets of a power of the universe, dense bitset-backed. Tuples enumerate
// in lexicographic order.
struct Relation {
    int universe = 0;
    int power = 0;
    std::vector<bool> bits;
    std::size_t count = 0;

    static Relation empty(int universe, int power);  // throws CapExceeded when huge

    std::size_t index(std::span<const Elem> t) const;
    bool contains(std::span<const Elem> t) const;
    void add(std::span<const Elem> t);
    void add(std::initializer_list<Elem> t);
    std::vector<Tuple> tuples() const;

    // Binary-relation helpers (power == 2).
    bool edge(Elem a, Elem b) const;
    void add_edge(Elem a, Elem b);
    bool is_symmetric() const;
    std::vector<Elem> out_neighbors(Elem a) const;
    std::vector<Elem> in_neighbors(Elem a) const;
};

// Evaluates a term whose heads are all basic operations of A, materializing
// its table over def.params (which must cover the body's variables).
OperationTable eval_term(const FiniteAlgebra& A, const TermPool& pool, const TermDef& def,
                         std::uint64_t max_cells = 1ull << 27);

// Single-point evaluation with condition symbols interpreted by bound
// definitions. Bound bodies may themselves use bound symbols (acyclically)
// or basic operations.
Elem eval_term_at(const FiniteAlgebra& A, const TermPool& pool, TermId t,
                  const std::map<std::string, TermDef>& binding,
                  const std::map<std::string, Elem>& env);

struct SatisfactionReport {
    bool ok = true;
    std::size_t equation = 0;               // index of the first failing equation
    std::vector<std::string> variables;     // its variables in order
    Tuple assignment;                        // first failing assignment (lex)
    Elem lhs = 0, rhs = 0;
};

// Does A satisfy sys when every symbol is interpreted by its bound term?
SatisfactionReport satisfies(const FiniteAlgebra& A, const TermPool& pool,
                             const EquationSystem& sys,
                             const std::map<std::string, TermDef>& binding);

enum class Shape {
    Idempotent,
    NearUnanimity,
    WeakNearUnanimity,
    Cyclic,
    Siggers6,
    Siggers4,
};

struct ShapeReport {
    bool ok = true;
    Tuple counterexample;  // witness values (per shape) of the first failure
};

ShapeReport check_shape(const OperationTable& op, int n, Shape shape);

struct TaylorOperationReport {
    std::optional<TaylorSystem> system;  // rows satisfied by op; row i covers i
    int first_uncovered = 0;             // 1-based, when no system
    bool idempotent = false;
};

// Decides whether op satisfies some system of two-variable equations
// covering every coordinate, by grouping argument patterns by their induced
// binary table. Deterministic: row for coordinate i is the lexicographically
// first witnessing pattern pair.
TaylorOperationReport is_taylor_operation(const OperationTable& op, int n,
                                          const std::string& symbol = "t");

struct CompatibilityReport {
    bool ok = true;
    std::vector<Tuple> rows;  // the arity-many relation tuples that escape
    Tuple image;
};

// Is R closed under op applied coordinatewise? Exhaustive over |R|^arity
// argument choices (lex over the sorted tuple list), short-circuiting on the
// first failure. Throws CapExceeded when the choice count exceeds budget.
CompatibilityReport compatible(const OperationTable& op, const Relation& R,
                               std::uint64_t budget = 50'000'000);

struct AbsorbWitness {
    int coordinate = 0;  // 1-based position of the deviant argument
    Tuple args;
    Elem value = 0;
};

// Does X absorb Y with respect to op: rows with one coordinate from Y and
// the rest from X must land in X. Returns the first failure (coordinate
// ascending, X-part lex, deviant ascending) or nullopt.
std::optional<AbsorbWitness> absorption_failure(const std::vector<Elem>& X,
                                                const std::vector<Elem>& Y,
                                                const OperationTable& op, int n,
                                                std::uint64_t budget = 50'000'000);

struct AbsorptionReport {
    bool ok = true;
    bool compatible = true;  // false when the compatibility precheck failed
    Elem vertex = 0;         // non-isolated vertex whose neighborhood fails
    AbsorbWitness witness;
};

// For every non-isolated x: does x's neighborhood absorb itself plus x?
// R must be symmetric (throws Error otherwise).
AbsorptionReport produces_enough_absorption(const Relation& R, const OperationTable& op,
                                            std::uint64_t budget = 50'000'000);

// Compatibility plus: every non-isolated x has its neighborhood absorbing
// the set of all non-isolated vertices.
AbsorptionReport semiabsorption_report(const Relation& R, const OperationTable& op,
                                       std::uint64_t budget = 50'000'000);

// Pads op to arity >= 3 (extra arguments ignored) and pins every
// near-unanimous row to its majority value. The result is a near-unanimity
// operation; compatibility with a given symmetric relation is the caller's
// check.
OperationTable nu_from_semiabsorbing(const OperationTable& op, int n);

}  // namespace malt
