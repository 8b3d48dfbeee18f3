#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "malt/algebra.hpp"

namespace malt {

enum class SearchStatus { Found, None, Budget };

// Shape constraints for a compatible operation. Near unanimity implies the
// idempotent pins; absorb_at additionally forces the neighborhood of that
// vertex to absorb the vertex plus its neighborhood.
struct PolymorphismQuery {
    int arity = 3;
    bool idempotent = true;
    bool near_unanimity = false;
    bool weak_near_unanimity = false;
    std::optional<Elem> absorb_at;
    std::uint64_t node_budget = 200'000;
};

struct PolymorphismResult {
    SearchStatus status = SearchStatus::None;
    std::optional<OperationTable> table;
    std::uint64_t nodes = 0;  // assignments tried during the search
};

// Complete backtracking search (arc consistency over table cells) for an
// operation of the requested shape compatible with R. None means no such
// operation exists; Budget means the node budget ran out first.
PolymorphismResult find_polymorphism(const Relation& R, const PolymorphismQuery& query);

// Bitmask encoding of digraphs on up to 8 vertices: bit i*n+j is the edge
// (i, j). Canonical masks are minimal under vertex relabeling.
Relation relation_from_mask(int n, std::uint64_t mask);
std::uint64_t mask_from_relation(const Relation& R);
bool is_canonical_mask(int n, std::uint64_t mask);

struct ConjectureOptions {
    int max_vertices = 4;
    bool exhaustive = true;      // enumerate canonical masks up to max_vertices
    std::size_t samples = 0;     // sampled mode: this many digraphs at max_vertices
    std::uint64_t seed = 1;
    PolymorphismQuery query;
    bool require_symmetric = false;
    bool local_absorption = false;  // test the local variant along an odd walk
};

struct ConjectureReport {
    std::size_t explored = 0;      // digraphs enumerated or sampled
    std::size_t candidates = 0;    // loopless digraphs passing the structural filters
    std::size_t confirmed = 0;     // no operation of the requested shape exists
    std::size_t inconclusive = 0;  // the search hit its budget
    std::vector<Relation> counterexamples;  // candidates that do carry an operation
};

// Probes the loop conjecture: a candidate is a loopless digraph that is
// smooth and of algebraic length one (or, in the local variant, symmetric
// with an odd closed walk); the conjecture predicts that no compatible
// operation of the requested shape exists for any candidate.
ConjectureReport check_loop_conjecture(const ConjectureOptions& opts);

}  // namespace malt
