#pragma once

#include <cstdint>
#include <deque>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "malt/error.hpp"

namespace malt {

using TermId = std::uint32_t;

// Operation symbols with their arities. Arities are at least 1; constants
// are not used anywhere in this workbench.
struct Signature {
    std::map<std::string, int> symbols;

    void declare(std::string_view name, int arity);
    const int* find(std::string_view name) const;
    int arity_of(std::string_view name) const;  // throws if undeclared
    bool empty() const { return symbols.empty(); }
};

// Hash-consed term DAG. Structurally equal terms always receive the same
// TermId, so deep compositions (a 12-ary symbol starred with itself twice
// has 1728 leaves) stay small in memory and equality is pointer equality.
// A pool is a per-session object: create one per computation or test and
// pass it around; there is no global state.
class TermPool {
  public:
    TermId variable(std::string_view name);
    TermId apply(std::string_view head, std::span<const TermId> args);
    TermId apply(std::string_view head, std::initializer_list<TermId> args);

    bool is_variable(TermId t) const;
    std::string_view var_name(TermId t) const;   // variables only
    std::string_view head(TermId t) const;       // applications only
    std::span<const TermId> args(TermId t) const;
    int depth(TermId t) const;  // variables have depth 0

    std::string print(TermId t) const;

    // Distinct variable names in order of first occurrence (preorder,
    // left to right). This ordering defines the implicit parameter list
    // of a term when none is given explicitly.
    std::vector<std::string> variables_in_order(TermId t) const;

    // Simultaneous substitution of variables by terms. Variables without
    // an entry are kept.
    TermId substitute(TermId t, const std::unordered_map<std::string, TermId>& by_var);

    // All node ids reachable from t, sorted ascending. Children always have
    // smaller ids than their parents, so this is a topological order.
    std::vector<TermId> reachable(TermId t) const;

    std::size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        std::int32_t var_sym = -1;   // string id when variable
        std::int32_t head_sym = -1;  // string id when application
        std::uint32_t args_begin = 0;
        std::uint32_t args_len = 0;
        std::uint32_t depth = 0;
    };

    std::int32_t intern_string(std::string_view s);

    std::vector<Node> nodes_;
    std::vector<TermId> arg_store_;
    // Deque keeps element addresses stable, so the string_views handed out
    // by var_name/head stay valid while the pool grows.
    std::deque<std::string> strings_;
    std::unordered_map<std::string, std::int32_t> string_ids_;
    std::unordered_map<std::int32_t, TermId> var_terms_;
    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint32_t>& k) const {
            std::size_t h = 1469598103934665603ull;
            for (auto v : k) {
                h ^= v;
                h *= 1099511628211ull;
            }
            return h;
        }
    };
    std::unordered_map<std::vector<std::uint32_t>, TermId, KeyHash> app_terms_;
};

// A term together with an explicit formal parameter list. The parameter
// list may name variables that do not occur in the body (a projection-like
// definition) and fixes the argument positions for evaluation.
struct TermDef {
    std::vector<std::string> params;
    TermId body = 0;
};

// Replaces every application of a defined symbol by the definition's body
// with parameters bound to the rewritten arguments. Definitions may refer
// to other defined symbols as long as there is no cycle. Symbols without a
// definition are kept.
TermId substitute_symbols(TermPool& pool, TermId t,
                          const std::map<std::string, TermDef>& defs);

// Reads one term from `text` (the whole string must be consumed).
// Identifiers that are declared in `sig` must be applied with the declared
// arity; bare identifiers are variables. Grammar: term := ident | '(' ident
// term+ ')'.
TermId parse_term(TermPool& pool, std::string_view text, const Signature& sig);

struct Equation {
    TermId lhs = 0;
    TermId rhs = 0;
};

// Reads "(= lhs rhs)".
Equation parse_equation(TermPool& pool, std::string_view text, const Signature& sig);

std::string print_equation(const TermPool& pool, const Equation& eq);

// The term f(x1,...,xn) with fresh variables named prefix1..prefixN.
TermId symbol_term(TermPool& pool, std::string_view symbol, int arity,
                   std::string_view prefix = "x");

// Star composition: for f with n parameters and g with m parameters,
// produces the (n*m)-ary term f(g(...), ..., g(...)) whose fresh variables
// are named prefix{i}_{j} and appear in row-major order (block i feeds the
// i-th argument of f). Parameters of f and g are their variables in order
// of first occurrence.
TermId star_compose(TermPool& pool, TermId f, TermId g, std::string_view prefix = "x");

}  // namespace malt
