#include "malt/closure.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "malt/error.hpp"

namespace malt {

namespace {

std::uint64_t fnv_bytes(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
    auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

struct TupleHash {
    std::size_t operator()(const Tuple& t) const {
        return static_cast<std::size_t>(fnv_bytes(t.data(), t.size() * sizeof(Elem)));
    }
};

using Seen = std::unordered_map<Tuple, std::size_t, TupleHash>;
using Pending = std::map<Tuple, Derivation>;

// Interns contiguous slices of one operation table so that currying a
// partial application is a cheap (slice, value) lookup.
struct SliceInterner {
    std::unordered_map<Tuple, std::uint32_t, TupleHash> ids;
    std::vector<Tuple> contents;
    std::unordered_map<std::uint64_t, std::uint32_t> transition;  // slice id << 16 | value

    std::uint32_t intern(Tuple slice) {
        auto it = ids.find(slice);
        if (it != ids.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(contents.size());
        ids.emplace(slice, id);
        contents.push_back(std::move(slice));
        return id;
    }

    std::uint32_t curry(std::uint32_t slice, Elem value, int n) {
        std::uint64_t key = (static_cast<std::uint64_t>(slice) << 16) | value;
        auto it = transition.find(key);
        if (it != transition.end()) return it->second;
        const Tuple& whole = contents[slice];
        std::size_t part = whole.size() / static_cast<std::size_t>(n);
        Tuple sub(whole.begin() + static_cast<std::ptrdiff_t>(part * value),
                  whole.begin() + static_cast<std::ptrdiff_t>(part * (value + 1)));
        std::uint32_t id = intern(std::move(sub));
        transition.emplace(key, id);
        return id;
    }
};

void expand_naive(const std::string& name, const OperationTable& op, int n,
                  const std::vector<Tuple>& elements, std::size_t frontier_begin,
                  const Seen& seen, Pending& pending) {
    std::size_t m = elements.size();
    std::size_t k = static_cast<std::size_t>(op.arity);
    std::size_t power = elements.front().size();
    std::vector<std::size_t> idx(k, 0);
    Tuple result(power);
    while (true) {
        bool fresh = false;
        for (std::size_t j = 0; j < k && !fresh; ++j) fresh = idx[j] >= frontier_begin;
        if (fresh) {
            for (std::size_t c = 0; c < power; ++c) {
                std::size_t flat = 0;
                for (std::size_t j = 0; j < k; ++j)
                    flat = flat * static_cast<std::size_t>(n) + elements[idx[j]][c];
                result[c] = op.table[flat];
            }
            if (!seen.count(result)) {
                Derivation d{name, std::vector<std::uint32_t>(idx.begin(), idx.end())};
                pending.emplace(result, std::move(d));
            }
        }
        std::size_t j = k;
        bool advanced = false;
        while (j > 0) {
            --j;
            if (++idx[j] < m) {
                advanced = true;
                break;
            }
            idx[j] = 0;
        }
        if (!advanced) return;
    }
}

// Layer-by-layer partial evaluation over argument positions.  Two argument
// prefixes merge when they curry the table to the same slice at every
// coordinate and agree on whether a frontier child was used.  States are
// discovered in lexicographic order of their least generating prefix, so
// the parent chain of the surviving state yields exactly the derivation
// the naive enumeration would record first.
void expand_curried(const std::string& name, const OperationTable& op, int n,
                    const std::vector<Tuple>& elements, std::size_t frontier_begin,
                    const Seen& seen, Pending& pending, SliceInterner& interner) {
    struct State {
        std::vector<std::uint32_t> slices;
        bool fresh;
        std::uint32_t parent;
        std::uint32_t last_child;
    };
    struct KeyHash {
        std::size_t operator()(const std::pair<std::vector<std::uint32_t>, bool>& key) const {
            return static_cast<std::size_t>(
                fnv_bytes(key.first.data(), key.first.size() * sizeof(std::uint32_t),
                          key.second ? 0x9e3779b97f4a7c15ULL : 1469598103934665603ULL));
        }
    };
    constexpr std::size_t kStateBudget = 2'000'000;

    std::size_t m = elements.size();
    std::size_t k = static_cast<std::size_t>(op.arity);
    std::size_t power = elements.front().size();
    std::uint32_t full = interner.intern(op.table);

    std::vector<std::vector<State>> layers(k + 1);
    layers[0].push_back({std::vector<std::uint32_t>(power, full), false, 0, 0});

    for (std::size_t depth = 0; depth < k; ++depth) {
        std::unordered_map<std::pair<std::vector<std::uint32_t>, bool>, std::uint32_t, KeyHash> dedup;
        for (std::uint32_t s = 0; s < layers[depth].size(); ++s) {
            const bool parent_fresh = layers[depth][s].fresh;
            for (std::size_t child = 0; child < m; ++child) {
                bool fresh = parent_fresh || child >= frontier_begin;
                if (depth + 1 == k && !fresh) continue;
                std::vector<std::uint32_t> slices(power);
                for (std::size_t c = 0; c < power; ++c)
                    slices[c] = interner.curry(layers[depth][s].slices[c], elements[child][c], n);
                auto key = std::make_pair(std::move(slices), fresh);
                if (dedup.count(key)) continue;
                std::uint32_t id = static_cast<std::uint32_t>(layers[depth + 1].size());
                layers[depth + 1].push_back(
                    {key.first, fresh, s, static_cast<std::uint32_t>(child)});
                dedup.emplace(std::move(key), id);
                if (layers[depth + 1].size() > kStateBudget)
                    throw CapExceeded("curried closure exceeded its state budget");
            }
        }
    }

    Tuple result(power);
    for (const State& st : layers[k]) {
        for (std::size_t c = 0; c < power; ++c) result[c] = interner.contents[st.slices[c]][0];
        if (seen.count(result) || pending.count(result)) continue;
        std::vector<std::uint32_t> children(k);
        const State* cur = &st;
        for (std::size_t depth = k; depth > 0; --depth) {
            children[depth - 1] = cur->last_child;
            cur = &layers[depth - 1][cur->parent];
        }
        pending.emplace(result, Derivation{name, std::move(children)});
    }
}

bool candidate_space_small(std::size_t m, std::size_t k) {
    constexpr std::size_t kNaiveBudget = 2'000'000;
    std::size_t total = 1;
    for (std::size_t j = 0; j < k; ++j) {
        if (total > kNaiveBudget / std::max<std::size_t>(m, 1)) return false;
        total *= m;
    }
    return total <= kNaiveBudget;
}

}  // namespace

std::optional<std::size_t> WitnessedClosure::index_of(const Tuple& t) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i] == t) return i;
    return std::nullopt;
}

WitnessedClosure generate_closure(const FiniteAlgebra& A, std::size_t power,
                                  const std::vector<Tuple>& generators,
                                  const ClosureOptions& opts) {
    A.validate();
    if (power == 0) throw Error("closure power must be positive");
    if (generators.empty()) throw Error("closure needs at least one generator");
    int n = A.size;
    for (const Tuple& g : generators) {
        if (g.size() != power) throw Error("generator length does not match the power");
        for (Elem v : g)
            if (v >= n) throw Error("generator entry out of range");
    }

    std::vector<std::pair<std::string, const OperationTable*>> ops;
    if (opts.op_names.empty()) {
        for (const auto& [name, op] : A.ops) ops.emplace_back(name, &op);
    } else {
        for (const std::string& name : opts.op_names) {
            auto it = A.ops.find(name);
            if (it == A.ops.end()) throw Error("closure references unknown operation: " + name);
            ops.emplace_back(name, &it->second);
        }
        std::sort(ops.begin(), ops.end());
        ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
    }
    for (const auto& [name, op] : ops)
        if (op->arity < 1) throw Error("closure requires operations of arity >= 1: " + name);

    WitnessedClosure wc;
    wc.universe = n;
    wc.power = power;

    Seen seen;
    for (const Tuple& g : generators) {
        if (seen.count(g)) continue;
        seen.emplace(g, wc.elements.size());
        wc.elements.push_back(g);
        wc.how.emplace_back(std::nullopt);
    }
    wc.generator_count = wc.elements.size();

    if (opts.target) {
        for (std::size_t i = 0; i < wc.elements.size(); ++i) {
            if (opts.target(wc.elements[i])) {
                wc.target_hit = i;
                return wc;
            }
        }
    }
    if (wc.elements.size() > opts.cap) return wc;

    std::vector<SliceInterner> interners(ops.size());
    std::size_t frontier_begin = 0;
    while (true) {
        ++wc.rounds;
        Pending pending;
        for (std::size_t oi = 0; oi < ops.size(); ++oi) {
            const auto& [name, op] = ops[oi];
            bool naive;
            switch (opts.strategy) {
                case ClosureStrategy::Naive: naive = true; break;
                case ClosureStrategy::Curried: naive = false; break;
                default:
                    naive = candidate_space_small(wc.elements.size(),
                                                  static_cast<std::size_t>(op->arity));
            }
            if (naive)
                expand_naive(name, *op, n, wc.elements, frontier_begin, seen, pending);
            else
                expand_curried(name, *op, n, wc.elements, frontier_begin, seen, pending,
                               interners[oi]);
        }
        if (pending.empty()) {
            wc.complete = true;
            return wc;
        }
        std::size_t appended_from = wc.elements.size();
        for (auto& [t, d] : pending) {
            seen.emplace(t, wc.elements.size());
            wc.elements.push_back(t);
            wc.how.emplace_back(std::move(d));
        }
        if (opts.target) {
            for (std::size_t i = appended_from; i < wc.elements.size(); ++i) {
                if (opts.target(wc.elements[i])) {
                    wc.target_hit = i;
                    return wc;
                }
            }
        }
        if (wc.elements.size() > opts.cap) return wc;
        frontier_begin = appended_from;
    }
}

TermId extract_witness(TermPool& pool, const WitnessedClosure& wc, std::size_t index,
                       const std::vector<std::string>& generator_names) {
    if (index >= wc.elements.size()) throw Error("witness index out of range");
    if (!generator_names.empty() && generator_names.size() != wc.generator_count)
        throw Error("generator name list does not match the generator count");

    std::vector<char> needed(index + 1, 0);
    std::vector<std::size_t> stack{index};
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        if (needed[i]) continue;
        needed[i] = 1;
        if (wc.how[i])
            for (std::uint32_t c : wc.how[i]->children) stack.push_back(c);
    }

    std::vector<TermId> term(index + 1, 0);
    std::vector<TermId> args;
    for (std::size_t i = 0; i <= index; ++i) {
        if (!needed[i]) continue;
        if (!wc.how[i]) {
            std::string name = generator_names.empty() ? "g" + std::to_string(i + 1)
                                                       : generator_names[i];
            term[i] = pool.variable(name);
        } else {
            args.clear();
            for (std::uint32_t c : wc.how[i]->children) args.push_back(term[c]);
            term[i] = pool.apply(wc.how[i]->op, args);
        }
    }
    return term[index];
}

Tuple replay(const FiniteAlgebra& A, const WitnessedClosure& wc, std::size_t index) {
    if (index >= wc.elements.size()) throw Error("replay index out of range");
    if (!wc.how[index]) return wc.elements[index];
    const Derivation& d = *wc.how[index];
    auto it = A.ops.find(d.op);
    if (it == A.ops.end()) throw Error("replay references unknown operation: " + d.op);
    const OperationTable& op = it->second;
    if (d.children.size() != static_cast<std::size_t>(op.arity))
        throw Error("replay arity mismatch for operation: " + d.op);
    Tuple result(wc.power);
    for (std::size_t c = 0; c < wc.power; ++c) {
        std::size_t flat = 0;
        for (std::uint32_t child : d.children) {
            if (child >= index) throw Error("replay child index is not prior to its parent");
            flat = flat * static_cast<std::size_t>(A.size) + wc.elements[child][c];
        }
        result[c] = op.table[flat];
    }
    return result;
}

bool replay_ok(const FiniteAlgebra& A, const WitnessedClosure& wc) {
    std::unordered_set<Tuple, TupleHash> distinct;
    for (std::size_t i = 0; i < wc.elements.size(); ++i) {
        if (wc.elements[i].size() != wc.power) return false;
        for (Elem v : wc.elements[i])
            if (v >= wc.universe) return false;
        if (!distinct.insert(wc.elements[i]).second) return false;
        if (!wc.how[i] && i >= wc.generator_count) return false;
        if (wc.how[i] && i < wc.generator_count) return false;
        if (replay(A, wc, i) != wc.elements[i]) return false;
    }
    return true;
}

std::vector<Tuple> power_projections(int universe, std::size_t arity) {
    std::size_t rows = checked_pow(universe, static_cast<int>(arity), 1u << 26);
    std::vector<Tuple> projs(arity, Tuple(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t rest = r;
        for (std::size_t j = arity; j > 0; --j) {
            projs[j - 1][r] = static_cast<Elem>(rest % universe);
            rest /= universe;
        }
    }
    return projs;
}

WitnessedClosure term_clone_slice(const FiniteAlgebra& A, std::size_t arity,
                                  const ClosureOptions& opts) {
    if (arity == 0) throw Error("term clone slice needs arity >= 1");
    std::size_t rows = checked_pow(A.size, static_cast<int>(arity), 1u << 26);
    return generate_closure(A, rows, power_projections(A.size, arity), opts);
}

FiniteAlgebra induced_algebra(const FiniteAlgebra& A, const TermPool& pool,
                              const std::map<std::string, TermDef>& defs) {
    FiniteAlgebra B;
    B.size = A.size;
    for (const auto& [name, def] : defs) B.ops[name] = eval_term(A, pool, def);
    B.validate();
    return B;
}

}  // namespace malt
