#include "malt/term.hpp"

#include <algorithm>
#include <cctype>

namespace malt {

void Signature::declare(std::string_view name, int arity) {
    if (arity < 1) throw Error("symbol arity must be at least 1: " + std::string(name));
    auto [it, fresh] = symbols.emplace(std::string(name), arity);
    if (!fresh && it->second != arity)
        throw Error("symbol redeclared with different arity: " + std::string(name));
}

const int* Signature::find(std::string_view name) const {
    auto it = symbols.find(std::string(name));
    return it == symbols.end() ? nullptr : &it->second;
}

int Signature::arity_of(std::string_view name) const {
    const int* a = find(name);
    if (!a) throw Error("undeclared symbol: " + std::string(name));
    return *a;
}

std::int32_t TermPool::intern_string(std::string_view s) {
    auto it = string_ids_.find(std::string(s));
    if (it != string_ids_.end()) return it->second;
    std::int32_t id = static_cast<std::int32_t>(strings_.size());
    strings_.emplace_back(s);
    string_ids_.emplace(strings_.back(), id);
    return id;
}

TermId TermPool::variable(std::string_view name) {
    if (name.empty()) throw Error("empty variable name");
    std::int32_t sym = intern_string(name);
    auto it = var_terms_.find(sym);
    if (it != var_terms_.end()) return it->second;
    TermId id = static_cast<TermId>(nodes_.size());
    Node n;
    n.var_sym = sym;
    nodes_.push_back(n);
    var_terms_.emplace(sym, id);
    return id;
}

TermId TermPool::apply(std::string_view head, std::span<const TermId> args) {
    if (args.empty()) throw Error("application with no arguments: " + std::string(head));
    std::int32_t sym = intern_string(head);
    std::vector<std::uint32_t> key;
    key.reserve(args.size() + 1);
    key.push_back(static_cast<std::uint32_t>(sym));
    for (TermId a : args) {
        if (a >= nodes_.size()) throw Error("argument term id out of range");
        key.push_back(a);
    }
    auto it = app_terms_.find(key);
    if (it != app_terms_.end()) return it->second;
    TermId id = static_cast<TermId>(nodes_.size());
    Node n;
    n.head_sym = sym;
    n.args_begin = static_cast<std::uint32_t>(arg_store_.size());
    n.args_len = static_cast<std::uint32_t>(args.size());
    std::uint32_t d = 0;
    for (TermId a : args) d = std::max(d, nodes_[a].depth);
    n.depth = d + 1;
    arg_store_.insert(arg_store_.end(), args.begin(), args.end());
    nodes_.push_back(n);
    app_terms_.emplace(std::move(key), id);
    return id;
}

TermId TermPool::apply(std::string_view head, std::initializer_list<TermId> args) {
    return apply(head, std::span<const TermId>(args.begin(), args.size()));
}

bool TermPool::is_variable(TermId t) const { return nodes_.at(t).var_sym >= 0; }

std::string_view TermPool::var_name(TermId t) const {
    const Node& n = nodes_.at(t);
    if (n.var_sym < 0) throw Error("var_name on application node");
    return strings_[n.var_sym];
}

std::string_view TermPool::head(TermId t) const {
    const Node& n = nodes_.at(t);
    if (n.head_sym < 0) throw Error("head on variable node");
    return strings_[n.head_sym];
}

std::span<const TermId> TermPool::args(TermId t) const {
    const Node& n = nodes_.at(t);
    if (n.head_sym < 0) return {};
    return {arg_store_.data() + n.args_begin, n.args_len};
}

int TermPool::depth(TermId t) const { return static_cast<int>(nodes_.at(t).depth); }

std::string TermPool::print(TermId t) const {
    std::string out;
    // Explicit stack to avoid recursion depth limits on deep terms.
    struct Item {
        TermId id;
        std::size_t next_arg;
    };
    std::vector<Item> stack;
    auto open = [&](TermId id) {
        if (is_variable(id)) {
            out += var_name(id);
            return false;
        }
        out += '(';
        out += head(id);
        return true;
    };
    if (open(t)) stack.push_back({t, 0});
    while (!stack.empty()) {
        Item& top = stack.back();
        auto as = args(top.id);
        if (top.next_arg == as.size()) {
            out += ')';
            stack.pop_back();
            continue;
        }
        TermId child = as[top.next_arg++];
        out += ' ';
        if (open(child)) stack.push_back({child, 0});
    }
    return out;
}

std::vector<std::string> TermPool::variables_in_order(TermId t) const {
    std::vector<std::string> order;
    std::vector<char> seen_var(strings_.size(), 0);
    // Preorder walk, left to right. DAG sharing is fine here: revisiting a
    // node cannot introduce a first occurrence, so we may skip visited
    // subterms entirely only if they contain no unseen variables; simplest
    // correct approach is to walk the tree but memoize per-node variable
    // sets implicitly via a visited marker per (node, nothing-new) state.
    // Terms in this codebase are small DAGs; a plain tree walk with a
    // visited set keyed by node id is sufficient because the variables of
    // a shared node are already recorded at its first visit.
    std::vector<char> visited(nodes_.size(), 0);
    std::vector<TermId> stack{t};
    // A node whose subtree was fully recorded once contributes nothing new.
    while (!stack.empty()) {
        TermId id = stack.back();
        stack.pop_back();
        if (visited[id]) continue;
        visited[id] = 1;
        const Node& n = nodes_[id];
        if (n.var_sym >= 0) {
            if (!seen_var[n.var_sym]) {
                seen_var[n.var_sym] = 1;
                order.push_back(strings_[n.var_sym]);
            }
            continue;
        }
        // Push children in reverse so the leftmost is visited first.
        for (std::size_t i = n.args_len; i-- > 0;) stack.push_back(arg_store_[n.args_begin + i]);
    }
    return order;
}

TermId TermPool::substitute(TermId t, const std::unordered_map<std::string, TermId>& by_var) {
    std::unordered_map<TermId, TermId> memo;
    std::vector<TermId> order = reachable(t);
    for (TermId id : order) {
        if (is_variable(id)) {
            auto it = by_var.find(std::string(var_name(id)));
            memo[id] = (it == by_var.end()) ? id : it->second;
        } else {
            auto as = args(id);
            std::vector<TermId> sub;
            sub.reserve(as.size());
            bool changed = false;
            for (TermId a : as) {
                TermId m = memo.at(a);
                changed |= (m != a);
                sub.push_back(m);
            }
            memo[id] = changed ? apply(head(id), sub) : id;
        }
    }
    return memo.at(t);
}

std::vector<TermId> TermPool::reachable(TermId t) const {
    std::vector<TermId> out;
    std::vector<char> visited(nodes_.size(), 0);
    std::vector<TermId> stack{t};
    while (!stack.empty()) {
        TermId id = stack.back();
        stack.pop_back();
        if (visited[id]) continue;
        visited[id] = 1;
        out.push_back(id);
        const Node& n = nodes_[id];
        for (std::uint32_t i = 0; i < n.args_len; ++i) stack.push_back(arg_store_[n.args_begin + i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Reader {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos == text.size();
    }
    char peek() {
        skip_ws();
        if (pos == text.size()) throw ParseError("unexpected end of input", pos);
        return text[pos];
    }
    static bool ident_char(char c) {
        return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')';
    }
    std::string_view ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        if (pos == start) throw ParseError("expected identifier", pos);
        return text.substr(start, pos - start);
    }

    TermId term(TermPool& pool, const Signature& sig) {
        if (peek() != '(') {
            std::size_t at = pos;
            std::string_view name = ident();
            if (const int* a = sig.find(name))
                throw ParseError("symbol " + std::string(name) + "/" + std::to_string(*a) +
                                     " used without arguments",
                                 at);
            return pool.variable(name);
        }
        std::size_t open_at = pos;
        ++pos;  // consume '('
        std::size_t head_at = pos;
        std::string_view h = ident();
        const int* arity = sig.find(h);
        if (!arity)
            throw ParseError("applied head not declared in signature: " + std::string(h), head_at);
        std::vector<TermId> as;
        while (true) {
            skip_ws();
            if (pos == text.size()) throw ParseError("unbalanced parenthesis", open_at);
            if (text[pos] == ')') {
                ++pos;
                break;
            }
            as.push_back(term(pool, sig));
        }
        if (static_cast<int>(as.size()) != *arity)
            throw ParseError("arity mismatch for " + std::string(h) + ": expected " +
                                 std::to_string(*arity) + ", got " + std::to_string(as.size()),
                             open_at);
        return pool.apply(h, as);
    }
};

}  // namespace

TermId parse_term(TermPool& pool, std::string_view text, const Signature& sig) {
    Reader r{text};
    TermId t = r.term(pool, sig);
    if (!r.at_end()) throw ParseError("trailing input after term", r.pos);
    return t;
}

Equation parse_equation(TermPool& pool, std::string_view text, const Signature& sig) {
    Reader r{text};
    if (r.peek() != '(') throw ParseError("equation must start with '(='", r.pos);
    ++r.pos;
    std::size_t at = r.pos;
    if (r.ident() != "=") throw ParseError("equation must start with '(='", at);
    Equation eq;
    eq.lhs = r.term(pool, sig);
    eq.rhs = r.term(pool, sig);
    r.skip_ws();
    if (r.pos == text.size() || text[r.pos] != ')')
        throw ParseError("expected ')' closing equation", r.pos);
    ++r.pos;
    if (!r.at_end()) throw ParseError("trailing input after equation", r.pos);
    return eq;
}

std::string print_equation(const TermPool& pool, const Equation& eq) {
    return "(= " + pool.print(eq.lhs) + " " + pool.print(eq.rhs) + ")";
}

TermId symbol_term(TermPool& pool, std::string_view symbol, int arity, std::string_view prefix) {
    std::vector<TermId> vars;
    vars.reserve(arity);
    for (int i = 1; i <= arity; ++i)
        vars.push_back(pool.variable(std::string(prefix) + std::to_string(i)));
    return pool.apply(symbol, vars);
}

namespace {

TermId substitute_symbols_rec(TermPool& pool, TermId t,
                              const std::map<std::string, TermDef>& defs,
                              std::unordered_map<TermId, TermId>& memo, int guard) {
    if (guard <= 0) throw Error("definition nesting too deep (cyclic definitions?)");
    if (pool.is_variable(t)) return t;
    auto hit = memo.find(t);
    if (hit != memo.end()) return hit->second;
    std::vector<TermId> args;
    args.reserve(pool.args(t).size());
    for (TermId a : pool.args(t))
        args.push_back(substitute_symbols_rec(pool, a, defs, memo, guard));
    std::string head(pool.head(t));
    TermId out;
    auto def = defs.find(head);
    if (def == defs.end()) {
        out = pool.apply(head, args);
    } else {
        if (def->second.params.size() != args.size())
            throw Error("arity mismatch while inlining '" + head + "'");
        TermId body = substitute_symbols_rec(pool, def->second.body, defs, memo, guard - 1);
        std::unordered_map<std::string, TermId> by_var;
        for (std::size_t i = 0; i < args.size(); ++i)
            by_var.emplace(def->second.params[i], args[i]);
        out = pool.substitute(body, by_var);
    }
    memo.emplace(t, out);
    return out;
}

}  // namespace

TermId substitute_symbols(TermPool& pool, TermId t,
                          const std::map<std::string, TermDef>& defs) {
    std::unordered_map<TermId, TermId> memo;
    return substitute_symbols_rec(pool, t, defs, memo, 64);
}

TermId star_compose(TermPool& pool, TermId f, TermId g, std::string_view prefix) {
    std::vector<std::string> fv = pool.variables_in_order(f);
    std::vector<std::string> gv = pool.variables_in_order(g);
    if (fv.empty() || gv.empty()) throw Error("star_compose requires terms with variables");
    std::unordered_map<std::string, TermId> outer;
    for (std::size_t i = 0; i < fv.size(); ++i) {
        std::unordered_map<std::string, TermId> inner;
        for (std::size_t j = 0; j < gv.size(); ++j) {
            std::string name = std::string(prefix) + std::to_string(i + 1) + "_" +
                               std::to_string(j + 1);
            inner.emplace(gv[j], pool.variable(name));
        }
        outer.emplace(fv[i], pool.substitute(g, inner));
    }
    return pool.substitute(f, outer);
}

}  // namespace malt
