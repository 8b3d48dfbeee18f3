#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "malt/term.hpp"

namespace malt {

// Two-variable patterns. Rows of linear two-variable equations are stored as
// strings over this alphabet; X is always the first variable of the row's
// canonical orientation.
enum class XY : std::uint8_t { X = 0, Y = 1 };

inline XY flip(XY v) { return v == XY::X ? XY::Y : XY::X; }

// x+x = y+y = x, x+y = y+x = y. Used when composing pattern rows.
inline XY xy_add(XY a, XY b) { return a == b ? XY::X : XY::Y; }

inline char xy_char(XY v) { return v == XY::X ? 'x' : 'y'; }

using PatternRow = std::vector<XY>;

PatternRow parse_pattern(const std::string& s);  // "xxy" -> {X,X,Y}
std::string pattern_string(const PatternRow& row);

struct TaylorRow {
    PatternRow lhs;
    PatternRow rhs;
};

// A system of two-variable linear equations in one symbol, with a witness row
// per argument position showing X on the left and Y on the right there.
struct TaylorSystem {
    std::string symbol;
    int arity = 0;
    std::vector<TaylorRow> rows;
    std::vector<std::size_t> coverage;  // coordinate i -> index into rows

    bool well_formed() const;
};

struct EquationSystem {
    Signature signature;
    std::vector<Equation> equations;
};

// Every equation has height <= 1 on both sides (variables or a single
// application of a symbol to variables).
bool is_linear(const TermPool& pool, const EquationSystem& sys);

// sys plus f(x,..,x) = x for every declared symbol (skipping duplicates).
EquationSystem with_idempotency(TermPool& pool, const EquationSystem& sys);

// Choice of a projection coordinate (1-based) for every symbol.
struct ProjectionAssignment {
    std::map<std::string, int> choice;
};

// Satisfiability by projections. Enumerates assignments in mixed-radix order
// (symbols sorted by name, coordinates ascending) and returns the first
// witness, or nullopt if none satisfies all equations. Throws CapExceeded if
// the assignment count exceeds `cap`.
std::optional<ProjectionAssignment> check_trivial(const TermPool& pool,
                                                  const EquationSystem& sys,
                                                  std::uint64_t cap = 10'000'000);

struct NotTaylorShape {
    int first_uncovered = 0;  // 1-based coordinate with no witness row
};

// Interprets sys as rows over one symbol and two variables per equation.
// Throws Error if some equation is not symbol(vars..) = symbol(vars..) with
// at most two distinct variables. Returns the covered TaylorSystem or the
// first uncovered coordinate.
std::variant<TaylorSystem, NotTaylorShape> is_taylor_shape(const TermPool& pool,
                                                           const EquationSystem& sys,
                                                           const std::string& symbol);

// The two-equation companion of a Taylor system: a fresh n^2-ary symbol "s"
// standing for t composed with itself, with one n-variable equation and one
// two-variable equation. Throws Error if ts is not well formed.
EquationSystem taylor_to_pair_system(TermPool& pool, const TaylorSystem& ts);

// The same content squeezed into a single equation over the original symbol:
// both sides are depth-2 nestings of ts.symbol over variables x, y.
Equation single_nontrivial_equation(TermPool& pool, const TaylorSystem& ts);

// 4-entry column of a two-equation system: (eq1 lhs, eq1 rhs, eq2 lhs,
// eq2 rhs) entries at one argument position.
using Column = std::array<XY, 4>;

// The 12 columns over {X,Y}^4 that avoid (a1==a2 and b1==b2), in
// lexicographic order with X < Y. Slot numbers are 1-based ranks here.
const std::vector<Column>& double_loop_columns();

// 1-based canonical slot of a column, or 0 if the column is one of the four
// forbidden constant-pair columns.
int double_loop_slot(const Column& col);

struct ColumnMatrix {
    std::vector<Column> columns;    // one per argument position
    std::vector<int> slots;         // canonical slot per position (1-based)
};

struct NormalizedTwoEquation {
    EquationSystem system;          // the canonical 12-ary double loop system
    ColumnMatrix matrix;            // per input position: column and slot
};

struct TrivialTwoEquation {
    int coordinate = 0;             // 1-based projection satisfying the input
};

// Normalizes a nontrivial system of two linear equations in one symbol and
// two variables to the canonical double loop system. Input positions map to
// canonical slots; slots never hit are dummies. Throws Error on shape
// violations (not exactly two equations, a side not an application of the
// common symbol, more than two variables in an equation).
std::variant<NormalizedTwoEquation, TrivialTwoEquation> normalize_two_equation(
    TermPool& pool, const EquationSystem& sys);

// Named catalog of strong Maltsev conditions. Parameterized families:
// wnu(n), cyclic(n), idempotency(n); `param` is ignored by the rest.
// Throws Error for unknown names or out-of-range parameters.
EquationSystem builtin_system(TermPool& pool, const std::string& name, int param = 0);

// Catalog names in stable order, for CLI listings.
const std::vector<std::string>& builtin_system_names();

}  // namespace malt
