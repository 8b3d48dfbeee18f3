#pragma once

#include <optional>
#include <span>
#include <vector>

#include "malt/algebra.hpp"

namespace malt {

// Binary relation composition: (u,w) when some v has (u,v) in R, (v,w) in S.
Relation compose(const Relation& R, const Relation& S);
Relation relation_power(const Relation& R, int k);

// Smallest v with (v,v) in R.
std::optional<Elem> find_any_loop(const Relation& R);

// Shortest closed walk of odd length, as its vertex sequence (edges run
// between consecutive entries and from the last back to the first).
// Deterministic: shortest length first, then smallest starting vertex.
std::optional<std::vector<Elem>> find_odd_closed_walk(const Relation& R);

struct DigraphClass {
    bool smooth = false;
    bool has_loop = false;
    std::optional<std::size_t> odd_closed_walk_length;
    bool algebraic_length_one = false;
};
DigraphClass classify_digraph(const Relation& R);

// Slow reference for algebraic length one: searches closed walks with one
// more forward than backward edge, up to max_steps edges.
bool has_algebraic_length_one_walk(const Relation& R, std::size_t max_steps = 10);

// An operation with constants pinned onto a suffix of its argument list.
struct PinnedOp {
    const OperationTable* base = nullptr;
    Tuple pins;

    int arity() const { return base->arity - static_cast<int>(pins.size()); }
    Elem apply(int n, std::span<const Elem> free_args) const;
};

// One node of the loop-search recursion.  The measure (g_arity, l) drops
// lexicographically along every parent-child edge.
struct LoopFrame {
    enum class Role { Root, Power, Restriction };
    enum class Outcome { CycleLoop, UnaryLoop, Delegated };

    int parent = -1;
    Role role = Role::Root;
    std::size_t g_arity = 0;
    std::size_t l = 0;
    std::vector<Elem> universe;
    std::size_t edges = 0;
    std::vector<Elem> cycle;  // odd closed walk in this frame's relation
    Outcome outcome = Outcome::Delegated;
    Elem loop = 0;            // loop vertex of this frame's relation
    // Triangle extracted from the power child's loop (Delegated frames).
    Elem tri_a = 0, tri_b = 0, tri_c = 0;
};

struct LoopCertificate {
    Elem loop = 0;
    std::vector<LoopFrame> frames;
};

struct LoopOptions {
    std::size_t max_frames = 100'000;
    // Recheck the five entry conditions at every frame (costly; testing).
    bool revalidate = false;
    std::uint64_t check_budget = 2'000'000;
    // Start the recursion from this odd closed walk instead of searching
    // for one.  Without it the search prefers the shortest odd closed walk
    // that is not itself a loop, falling back to a loop vertex.
    std::optional<std::vector<Elem>> start_cycle;
};

// The recursion: descends to the third relational power until the cycle
// collapses to a triangle, then restricts to a triangle vertex's
// neighborhood with that vertex pinned onto g, until g is unary or the
// cycle is a loop.  R must be symmetric with an odd closed walk; f must be
// compatible and produce enough absorption (checked by find_loop modes,
// or on demand via revalidate).
LoopCertificate find_loop_constructive(const Relation& R, const OperationTable& f,
                                       const LoopOptions& opts = {});

enum class LoopMode {
    NearUnanimity,  // f is a near unanimity operation compatible with R
    Absorbing,      // R absorbs the full square wrt the idempotent f
    Lemma,          // f compatible, R produces enough absorption wrt f
};

// Verifies the mode's entry conditions (throwing an Error that names the
// failed condition and a counterexample), then runs the search.
LoopCertificate find_loop(const Relation& R, const OperationTable& f, LoopMode mode,
                          const LoopOptions& opts = {});

// Items (1)-(5) for one recursion frame; throws on the first violation.
void validate_loop_preconditions(const Relation& R, const std::vector<Elem>& universe,
                                 const OperationTable& f, const PinnedOp& g,
                                 const std::vector<Elem>& cycle,
                                 std::uint64_t budget = 2'000'000);

// Recomputes every frame's relation from the root and checks the stored
// fields, outcomes, and the final loop.  Throws on any mismatch.
void audit_certificate(const Relation& R, const OperationTable& f,
                       const LoopCertificate& cert);

// Entry-condition helper for the Absorbing mode: does R, viewed as a set
// of pairs, absorb the full square wrt the componentwise action of op?
struct SquareAbsorption {
    bool ok = true;
    std::vector<Tuple> rows;  // pair rows fed to op (each a 2-tuple)
    Tuple image;              // resulting pair outside R
};
SquareAbsorption relation_absorbs_square(const Relation& R, const OperationTable& op,
                                         std::uint64_t budget = 50'000'000);

}  // namespace malt
