#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "malt/algebra.hpp"
#include "malt/equations.hpp"
#include "malt/term.hpp"

namespace malt {

// FNV-1a over raw bytes; used to fingerprint input files in run reports.
std::uint64_t fnv1a(std::string_view bytes);

// Wire formats. Parse errors surface as Error with the position the JSON
// parser reported.
//   EquationSystem  {"symbols":{"t":6},"equations":["(= (t x x y) (t y x x))", ...]}
//   FiniteAlgebra   {"size":2,"ops":{"maj":{"arity":3,"table":[0,0,0,1,0,1,1,1]}}}
//   Relation        {"power":2,"tuples":[[0,1],[1,0]]} with optional "universe"
//                   (inferred from the largest entry when absent, emitted always)
EquationSystem system_from_json(TermPool& pool, const std::string& text);
std::string system_to_json(const TermPool& pool, const EquationSystem& sys);

FiniteAlgebra algebra_from_json(const std::string& text);
std::string algebra_to_json(const FiniteAlgebra& A);

Relation relation_from_json(const std::string& text);
std::string relation_to_json(const Relation& R);

// {"params":["x1",...],"body":"(op ...)"}; parsing needs the signature that
// declares the body's heads.
TermDef term_def_from_json(TermPool& pool, const std::string& text, const Signature& sig);
std::string term_def_to_json(const TermPool& pool, const TermDef& def);

// Signature whose symbols are the algebra's basic operations; lets emitted
// witness terms re-parse without hand-building declarations.
Signature basic_signature(const FiniteAlgebra& A);

}  // namespace malt
