#include "malt/polymorphism.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <set>

#include "malt/error.hpp"
#include "malt/loops.hpp"

namespace malt {

namespace {

constexpr std::uint64_t kArcBudget = 10'000'000;

struct CellUnion {
    std::vector<std::size_t> parent;

    explicit CellUnion(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void merge(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

struct ArcSolver {
    int n = 0;
    std::vector<std::uint64_t> rows, cols;     // adjacency masks of R
    std::vector<std::pair<int, int>> arcs;     // over variable ids
    std::vector<std::vector<int>> incident;    // variable -> arc indices
    std::uint64_t nodes = 0;
    std::uint64_t budget = 0;

    bool propagate(std::vector<std::uint64_t>& dom, const std::vector<int>& seeds) const {
        std::vector<char> inq(arcs.size(), 0);
        std::vector<int> queue = seeds;
        for (int a : seeds) inq[static_cast<std::size_t>(a)] = 1;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int ai = queue[qi];
            inq[static_cast<std::size_t>(ai)] = 0;
            auto [u, v] = arcs[static_cast<std::size_t>(ai)];
            std::uint64_t nu = 0;
            for (std::uint64_t m = dom[u]; m; m &= m - 1) {
                int x = std::countr_zero(m);
                if (rows[static_cast<std::size_t>(x)] & dom[v]) nu |= 1ull << x;
            }
            if (nu != dom[u]) {
                dom[u] = nu;
                if (!nu) return false;
                for (int e : incident[static_cast<std::size_t>(u)])
                    if (!inq[static_cast<std::size_t>(e)]) {
                        inq[static_cast<std::size_t>(e)] = 1;
                        queue.push_back(e);
                    }
            }
            std::uint64_t nv = 0;
            for (std::uint64_t m = dom[v]; m; m &= m - 1) {
                int y = std::countr_zero(m);
                if (cols[static_cast<std::size_t>(y)] & dom[u]) nv |= 1ull << y;
            }
            if (nv != dom[v]) {
                dom[v] = nv;
                if (!nv) return false;
                for (int e : incident[static_cast<std::size_t>(v)])
                    if (!inq[static_cast<std::size_t>(e)]) {
                        inq[static_cast<std::size_t>(e)] = 1;
                        queue.push_back(e);
                    }
            }
        }
        return true;
    }

    // true = solution in `dom`, false = exhausted, nullopt = out of budget
    std::optional<bool> search(std::vector<std::uint64_t>& dom) {
        int pick = -1;
        for (std::size_t i = 0; i < dom.size(); ++i)
            if (std::popcount(dom[i]) > 1) {
                pick = static_cast<int>(i);
                break;
            }
        if (pick < 0) return true;
        for (std::uint64_t m = dom[static_cast<std::size_t>(pick)]; m; m &= m - 1) {
            if (++nodes > budget) return std::nullopt;
            std::vector<std::uint64_t> next = dom;
            next[static_cast<std::size_t>(pick)] = m & ~(m - 1);
            if (!propagate(next, incident[static_cast<std::size_t>(pick)])) continue;
            auto sub = search(next);
            if (!sub) return std::nullopt;
            if (*sub) {
                dom = std::move(next);
                return true;
            }
        }
        return false;
    }
};

}  // namespace

PolymorphismResult find_polymorphism(const Relation& R, const PolymorphismQuery& query) {
    if (R.power != 2) throw Error("polymorphism search needs a binary relation");
    int n = R.universe;
    if (n < 1 || n > 32) throw Error("polymorphism search supports universes up to 32");
    int k = query.arity;
    if (k < 1) throw Error("polymorphism search needs a positive arity");
    if (query.near_unanimity && k < 3)
        throw Error("near unanimity needs arity at least 3");
    if (query.absorb_at && *query.absorb_at >= n)
        throw Error("absorption vertex out of range");

    std::size_t cells = static_cast<std::size_t>(checked_pow(n, k, 1ull << 24));
    CellUnion uf(cells);

    Tuple args(static_cast<std::size_t>(k));
    auto cell_of = [&](const Tuple& a) {
        return OperationTable::index(n, k, std::span<const Elem>(a));
    };

    if (query.weak_near_unanimity) {
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                if (x == y) continue;
                std::fill(args.begin(), args.end(), static_cast<Elem>(x));
                args[0] = static_cast<Elem>(y);
                std::size_t first = cell_of(args);
                for (int p = 1; p < k; ++p) {
                    args[p - 1] = static_cast<Elem>(x);
                    args[p] = static_cast<Elem>(y);
                    uf.merge(first, cell_of(args));
                }
            }
    }

    std::uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1;
    std::vector<std::uint64_t> cell_dom(cells, full);

    std::vector<Elem> plus;
    std::uint64_t plus_mask = 0;
    if (query.absorb_at) {
        plus = R.out_neighbors(*query.absorb_at);
        for (Elem v : plus) plus_mask |= 1ull << v;
    }

    std::fill(args.begin(), args.end(), static_cast<Elem>(0));
    for (std::size_t ci = 0; ci < cells; ++ci) {
        if (query.idempotent || query.near_unanimity || query.weak_near_unanimity) {
            bool diag = true;
            for (int i = 1; i < k; ++i) diag = diag && args[i] == args[0];
            if (diag) cell_dom[ci] &= 1ull << args[0];
        }
        if (query.near_unanimity) {
            std::vector<int> freq(static_cast<std::size_t>(n), 0);
            for (Elem a : args) ++freq[a];
            for (int v = 0; v < n; ++v)
                if (freq[static_cast<std::size_t>(v)] >= k - 1) cell_dom[ci] &= 1ull << v;
        }
        if (query.absorb_at && !plus.empty()) {
            Elem a = *query.absorb_at;
            int deviants = 0;
            bool deviant_is_a = false;
            for (Elem x : args)
                if (!(plus_mask >> x & 1)) {
                    ++deviants;
                    deviant_is_a = x == a;
                }
            if (deviants == 0 || (deviants == 1 && deviant_is_a)) cell_dom[ci] &= plus_mask;
        }
        for (std::size_t j = args.size(); j-- > 0;) {
            if (++args[j] < n) break;
            args[j] = 0;
        }
    }

    std::vector<int> var_of_cell(cells, -1);
    int vars = 0;
    for (std::size_t ci = 0; ci < cells; ++ci) {
        std::size_t r = uf.find(ci);
        if (var_of_cell[r] < 0) var_of_cell[r] = vars++;
        var_of_cell[ci] = var_of_cell[r];
    }
    std::vector<std::uint64_t> dom(static_cast<std::size_t>(vars), full);
    for (std::size_t ci = 0; ci < cells; ++ci)
        dom[static_cast<std::size_t>(var_of_cell[ci])] &= cell_dom[ci];

    ArcSolver solver;
    solver.n = n;
    solver.budget = query.node_budget;
    solver.rows.assign(static_cast<std::size_t>(n), 0);
    solver.cols.assign(static_cast<std::size_t>(n), 0);
    std::uint64_t loop_mask = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (R.edge(static_cast<Elem>(a), static_cast<Elem>(b))) {
                solver.rows[static_cast<std::size_t>(a)] |= 1ull << b;
                solver.cols[static_cast<std::size_t>(b)] |= 1ull << a;
                if (a == b) loop_mask |= 1ull << a;
            }

    auto edges = R.tuples();
    std::set<std::pair<int, int>> arc_set;
    if (!edges.empty()) {
        std::uint64_t combos = 1;
        for (int i = 0; i < k; ++i) {
            combos *= edges.size();
            if (combos > kArcBudget)
                throw CapExceeded("polymorphism arc enumeration exceeded its budget");
        }
        std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
        Tuple firsts(static_cast<std::size_t>(k)), seconds(static_cast<std::size_t>(k));
        while (true) {
            for (int i = 0; i < k; ++i) {
                firsts[i] = edges[idx[i]][0];
                seconds[i] = edges[idx[i]][1];
            }
            int u = var_of_cell[cell_of(firsts)];
            int v = var_of_cell[cell_of(seconds)];
            if (u == v)
                dom[static_cast<std::size_t>(u)] &= loop_mask;
            else
                arc_set.insert({u, v});
            std::size_t j = idx.size();
            bool advanced = false;
            while (j > 0) {
                --j;
                if (++idx[j] < edges.size()) {
                    advanced = true;
                    break;
                }
                idx[j] = 0;
            }
            if (!advanced) break;
        }
    }
    solver.arcs.assign(arc_set.begin(), arc_set.end());
    solver.incident.assign(static_cast<std::size_t>(vars), {});
    for (std::size_t ai = 0; ai < solver.arcs.size(); ++ai) {
        solver.incident[static_cast<std::size_t>(solver.arcs[ai].first)].push_back(
            static_cast<int>(ai));
        solver.incident[static_cast<std::size_t>(solver.arcs[ai].second)].push_back(
            static_cast<int>(ai));
    }

    PolymorphismResult out;
    bool wiped = false;
    for (std::uint64_t d : dom) wiped = wiped || d == 0;
    std::vector<int> all_arcs(solver.arcs.size());
    std::iota(all_arcs.begin(), all_arcs.end(), 0);
    if (wiped || !solver.propagate(dom, all_arcs)) {
        out.status = SearchStatus::None;
        return out;
    }

    auto res = solver.search(dom);
    out.nodes = solver.nodes;
    if (!res) {
        out.status = SearchStatus::Budget;
        return out;
    }
    if (!*res) {
        out.status = SearchStatus::None;
        return out;
    }

    OperationTable op;
    op.arity = k;
    op.table.resize(cells);
    for (std::size_t ci = 0; ci < cells; ++ci) {
        std::uint64_t d = dom[static_cast<std::size_t>(var_of_cell[ci])];
        op.table[ci] = static_cast<Elem>(std::countr_zero(d));
    }
    if (!compatible(op, R).ok)
        throw Error("internal: polymorphism search produced an incompatible table");
    if (query.idempotent && !check_shape(op, n, Shape::Idempotent).ok)
        throw Error("internal: polymorphism search lost idempotency");
    if (query.near_unanimity && !check_shape(op, n, Shape::NearUnanimity).ok)
        throw Error("internal: polymorphism search lost near unanimity");
    if (query.weak_near_unanimity && !check_shape(op, n, Shape::WeakNearUnanimity).ok)
        throw Error("internal: polymorphism search lost weak near unanimity");
    out.status = SearchStatus::Found;
    out.table = std::move(op);
    return out;
}

Relation relation_from_mask(int n, std::uint64_t mask) {
    if (n < 1 || n > 8) throw Error("mask digraphs support up to 8 vertices");
    Relation R = Relation::empty(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mask >> (i * n + j) & 1) R.add_edge(static_cast<Elem>(i), static_cast<Elem>(j));
    return R;
}

std::uint64_t mask_from_relation(const Relation& R) {
    if (R.power != 2 || R.universe > 8) throw Error("mask digraphs support up to 8 vertices");
    int n = R.universe;
    std::uint64_t mask = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (R.edge(static_cast<Elem>(i), static_cast<Elem>(j)))
                mask |= 1ull << (i * n + j);
    return mask;
}

bool is_canonical_mask(int n, std::uint64_t mask) {
    if (n < 1 || n > 8) throw Error("mask digraphs support up to 8 vertices");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::uint64_t relabeled = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (mask >> (i * n + j) & 1)
                    relabeled |= 1ull << (perm[static_cast<std::size_t>(i)] * n +
                                          perm[static_cast<std::size_t>(j)]);
        if (relabeled < mask) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
}

ConjectureReport check_loop_conjecture(const ConjectureOptions& opts) {
    ConjectureReport rep;

    auto consider = [&](const Relation& R) {
        ++rep.explored;
        auto cls = classify_digraph(R);
        if (cls.has_loop) return;
        if (opts.local_absorption) {
            if (!R.is_symmetric() || !cls.odd_closed_walk_length) return;
        } else {
            if (opts.require_symmetric && !R.is_symmetric()) return;
            if (!cls.smooth || !cls.algebraic_length_one) return;
        }
        PolymorphismQuery q = opts.query;
        if (opts.local_absorption) q.absorb_at = find_odd_closed_walk(R)->front();
        ++rep.candidates;
        auto res = find_polymorphism(R, q);
        switch (res.status) {
            case SearchStatus::None:
                ++rep.confirmed;
                break;
            case SearchStatus::Budget:
                ++rep.inconclusive;
                break;
            case SearchStatus::Found:
                rep.counterexamples.push_back(R);
                break;
        }
    };

    if (opts.exhaustive) {
        if (opts.max_vertices < 1 || opts.max_vertices > 4)
            throw Error("exhaustive exploration supports up to 4 vertices");
        for (int n = 1; n <= opts.max_vertices; ++n) {
            std::uint64_t top = 1ull << (n * n);
            for (std::uint64_t mask = 0; mask < top; ++mask)
                if (is_canonical_mask(n, mask)) consider(relation_from_mask(n, mask));
        }
    } else {
        int n = opts.max_vertices;
        if (n < 1 || n > 8) throw Error("sampling supports up to 8 vertices");
        std::uint64_t all = n * n == 64 ? ~0ull : (1ull << (n * n)) - 1;
        std::uint64_t diag = 0;
        for (int i = 0; i < n; ++i) diag |= 1ull << (i * n + i);
        std::mt19937_64 rng(opts.seed);
        for (std::size_t s = 0; s < opts.samples; ++s) {
            std::uint64_t mask = rng() & all & ~diag;
            if (opts.require_symmetric || opts.local_absorption) {
                std::uint64_t sym = mask;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (mask >> (i * n + j) & 1) sym |= 1ull << (j * n + i);
                mask = sym;
            }
            consider(relation_from_mask(n, mask));
        }
    }
    return rep;
}

}  // namespace malt
