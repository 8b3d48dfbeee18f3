#include "malt/loops.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "malt/error.hpp"

namespace malt {

namespace {

void require_binary(const Relation& R, const char* who) {
    if (R.power != 2) throw Error(std::string(who) + " needs a binary relation");
}

std::vector<char> member_mask(int n, const std::vector<Elem>& universe) {
    std::vector<char> mask(static_cast<std::size_t>(n), 0);
    for (Elem v : universe) mask[v] = 1;
    return mask;
}

}  // namespace

Relation compose(const Relation& R, const Relation& S) {
    require_binary(R, "compose");
    require_binary(S, "compose");
    if (R.universe != S.universe) throw Error("compose needs relations over one universe");
    int n = R.universe;
    std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
    std::vector<std::uint64_t> srow(static_cast<std::size_t>(n) * words, 0);
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            if (S.edge(static_cast<Elem>(v), static_cast<Elem>(w)))
                srow[static_cast<std::size_t>(v) * words + static_cast<std::size_t>(w) / 64] |=
                    1ull << (w % 64);
    Relation out = Relation::empty(n, 2);
    std::vector<std::uint64_t> acc(words);
    for (int u = 0; u < n; ++u) {
        std::fill(acc.begin(), acc.end(), 0);
        for (int v = 0; v < n; ++v)
            if (R.edge(static_cast<Elem>(u), static_cast<Elem>(v)))
                for (std::size_t i = 0; i < words; ++i)
                    acc[i] |= srow[static_cast<std::size_t>(v) * words + i];
        for (int w = 0; w < n; ++w)
            if (acc[static_cast<std::size_t>(w) / 64] >> (w % 64) & 1)
                out.add_edge(static_cast<Elem>(u), static_cast<Elem>(w));
    }
    return out;
}

Relation relation_power(const Relation& R, int k) {
    require_binary(R, "relation_power");
    if (k < 1) throw Error("relation_power needs a positive exponent");
    Relation out = R;
    for (int i = 1; i < k; ++i) out = compose(out, R);
    return out;
}

std::optional<Elem> find_any_loop(const Relation& R) {
    require_binary(R, "find_any_loop");
    for (int v = 0; v < R.universe; ++v)
        if (R.edge(static_cast<Elem>(v), static_cast<Elem>(v))) return static_cast<Elem>(v);
    return std::nullopt;
}

std::optional<std::vector<Elem>> find_odd_closed_walk(const Relation& R) {
    require_binary(R, "find_odd_closed_walk");
    int n = R.universe;
    auto bfs = [&](Elem s, std::vector<int>* pred_out) -> int {
        std::vector<int> dist(2 * static_cast<std::size_t>(n), -1);
        std::vector<int> pred(2 * static_cast<std::size_t>(n), -1);
        std::vector<int> queue;
        queue.push_back(s * 2);
        dist[static_cast<std::size_t>(s) * 2] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int cur = queue[qi];
            Elem v = static_cast<Elem>(cur / 2);
            int parity = cur % 2;
            for (Elem w : R.out_neighbors(v)) {
                int nxt = w * 2 + (parity ^ 1);
                if (dist[nxt] >= 0) continue;
                dist[nxt] = dist[cur] + 1;
                pred[nxt] = cur;
                queue.push_back(nxt);
            }
        }
        if (pred_out) *pred_out = pred;
        return dist[static_cast<std::size_t>(s) * 2 + 1];
    };

    int best_len = -1;
    Elem best_s = 0;
    for (int s = 0; s < n; ++s) {
        int d = bfs(static_cast<Elem>(s), nullptr);
        if (d > 0 && (best_len < 0 || d < best_len)) {
            best_len = d;
            best_s = static_cast<Elem>(s);
        }
    }
    if (best_len < 0) return std::nullopt;

    std::vector<int> pred;
    bfs(best_s, &pred);
    std::vector<Elem> seq;
    for (int cur = best_s * 2 + 1; cur != -1; cur = pred[cur])
        seq.push_back(static_cast<Elem>(cur / 2));
    std::reverse(seq.begin(), seq.end());
    seq.pop_back();  // the closing vertex repeats the start
    return seq;
}

DigraphClass classify_digraph(const Relation& R) {
    require_binary(R, "classify_digraph");
    int n = R.universe;
    DigraphClass out;

    out.smooth = true;
    for (int v = 0; v < n && out.smooth; ++v) {
        bool has_out = false, has_in = false;
        for (int w = 0; w < n; ++w) {
            has_out = has_out || R.edge(static_cast<Elem>(v), static_cast<Elem>(w));
            has_in = has_in || R.edge(static_cast<Elem>(w), static_cast<Elem>(v));
        }
        out.smooth = has_out == has_in;
    }
    out.has_loop = find_any_loop(R).has_value();
    if (auto walk = find_odd_closed_walk(R)) out.odd_closed_walk_length = walk->size();

    // Net lengths of closed walks within a weak component form the group
    // generated by the edge defects of any breadth-first potential.
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<long long> pot(static_cast<std::size_t>(n), 0);
    int comp_id = 0;
    for (int root = 0; root < n; ++root) {
        if (comp[root] >= 0) continue;
        bool incident = false;
        for (int w = 0; w < n && !incident; ++w)
            incident = R.edge(static_cast<Elem>(root), static_cast<Elem>(w)) ||
                       R.edge(static_cast<Elem>(w), static_cast<Elem>(root));
        if (!incident) continue;
        std::vector<int> queue{root};
        comp[root] = comp_id;
        pot[root] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int v = queue[qi];
            for (int w = 0; w < n; ++w) {
                bool fwd = R.edge(static_cast<Elem>(v), static_cast<Elem>(w));
                bool bwd = R.edge(static_cast<Elem>(w), static_cast<Elem>(v));
                if (!fwd && !bwd) continue;
                if (comp[w] >= 0) continue;
                comp[w] = comp_id;
                pot[w] = pot[v] + (fwd ? 1 : -1);
                queue.push_back(w);
            }
        }
        long long g = 0;
        for (int u : queue)
            for (int w = 0; w < n; ++w)
                if (R.edge(static_cast<Elem>(u), static_cast<Elem>(w)))
                    g = std::gcd(g, std::llabs(pot[u] + 1 - pot[w]));
        if (g == 1) out.algebraic_length_one = true;
        ++comp_id;
    }
    return out;
}

bool has_algebraic_length_one_walk(const Relation& R, std::size_t max_steps) {
    require_binary(R, "has_algebraic_length_one_walk");
    int n = R.universe;
    int width = 2 * static_cast<int>(max_steps) + 1;
    int offset = static_cast<int>(max_steps);
    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(static_cast<std::size_t>(n) * width, -1);
        std::vector<int> queue{s * width + offset};
        dist[static_cast<std::size_t>(s) * width + offset] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int cur = queue[qi];
            int v = cur / width;
            int net = cur % width - offset;
            if (v == s && net == 1) return true;
            if (dist[cur] == static_cast<int>(max_steps)) continue;
            auto push = [&](int w, int nn) {
                if (nn < -offset || nn > offset) return;
                int nxt = w * width + nn + offset;
                if (dist[nxt] >= 0) return;
                dist[nxt] = dist[cur] + 1;
                queue.push_back(nxt);
            };
            for (Elem w : R.out_neighbors(static_cast<Elem>(v))) push(w, net + 1);
            for (Elem w : R.in_neighbors(static_cast<Elem>(v))) push(w, net - 1);
        }
    }
    return false;
}

Elem PinnedOp::apply(int n, std::span<const Elem> free_args) const {
    if (static_cast<int>(free_args.size() + pins.size()) != base->arity)
        throw Error("pinned operation applied with the wrong number of arguments");
    Tuple full(free_args.begin(), free_args.end());
    full.insert(full.end(), pins.begin(), pins.end());
    return base->at(n, full);
}

namespace {

void check_cycle(const Relation& R, const std::vector<char>& mask,
                 const std::vector<Elem>& cycle) {
    if (cycle.empty() || cycle.size() % 2 == 0)
        throw Error("loop search needs an odd closed walk");
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        Elem u = cycle[i];
        Elem v = cycle[(i + 1) % cycle.size()];
        if (!mask[u] || !mask[v]) throw Error("odd closed walk leaves the universe");
        if (!R.edge(u, v)) throw Error("odd closed walk uses a missing edge");
    }
}

struct LoopSearch {
    const OperationTable& f;
    int n;
    const LoopOptions& opts;
    std::vector<LoopFrame> frames;

    Elem recurse(const Relation& R, const std::vector<Elem>& universe, const PinnedOp& g,
                 const std::vector<Elem>& cycle, int parent, LoopFrame::Role role) {
        if (frames.size() >= opts.max_frames)
            throw CapExceeded("loop search exceeded its frame budget");
        int my = static_cast<int>(frames.size());
        {
            LoopFrame fr;
            fr.parent = parent;
            fr.role = role;
            fr.g_arity = static_cast<std::size_t>(g.arity());
            fr.l = cycle.size();
            fr.universe = universe;
            fr.edges = R.count;
            fr.cycle = cycle;
            frames.push_back(std::move(fr));
        }
        if (parent >= 0) {
            std::size_t pa = frames[parent].g_arity, pl = frames[parent].l;
            std::size_t ca = frames[my].g_arity, cl = frames[my].l;
            if (!(ca < pa || (ca == pa && cl < pl)))
                throw Error("internal: loop recursion measure did not decrease");
        }

        auto mask = member_mask(n, universe);
        check_cycle(R, mask, cycle);
        if (opts.revalidate)
            validate_loop_preconditions(R, universe, f, g, cycle, opts.check_budget);

        if (cycle.size() == 1) {
            Elem v = cycle[0];
            frames[my].outcome = LoopFrame::Outcome::CycleLoop;
            frames[my].loop = v;
            return v;
        }
        if (g.arity() == 1) {
            Elem x = 0;
            bool found = false;
            for (Elem v : universe) {
                if (!R.out_neighbors(v).empty()) {
                    x = v;
                    found = true;
                    break;
                }
            }
            if (!found) throw Error("internal: no non-isolated vertex at a unary frame");
            Elem gx = g.apply(n, std::span<const Elem>(&x, 1));
            if (!mask[gx] || !R.edge(gx, gx))
                throw Error("internal: unary base step did not land on a loop");
            frames[my].outcome = LoopFrame::Outcome::UnaryLoop;
            frames[my].loop = gx;
            return gx;
        }

        // Descend to the third power with l - 2; the returned loop closes a
        // triangle here.
        Relation R3 = relation_power(R, 3);
        std::vector<Elem> subcycle(cycle.begin(), cycle.end() - 2);
        Elem a = recurse(R3, universe, g, subcycle, my, LoopFrame::Role::Power);

        Elem tb = 0, tc = 0;
        bool found = false;
        for (Elem b : R.out_neighbors(a)) {
            for (Elem c : R.out_neighbors(b)) {
                if (R.edge(c, a)) {
                    tb = b;
                    tc = c;
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) throw Error("internal: power loop did not yield a triangle");
        frames[my].tri_a = a;
        frames[my].tri_b = tb;
        frames[my].tri_c = tc;

        // Restrict to the neighborhood of a, pin a onto g, and walk an odd
        // cycle of length 2*arity(f) + 1 through the triangle.
        std::vector<Elem> sub_universe = R.out_neighbors(a);
        auto sub_mask = member_mask(n, sub_universe);
        Relation Rp = Relation::empty(n, 2);
        for (Elem u : sub_universe)
            for (Elem v : R.out_neighbors(u))
                if (sub_mask[v]) Rp.add_edge(u, v);

        PinnedOp g2{g.base, Tuple{}};
        g2.pins.reserve(g.pins.size() + 1);
        g2.pins.push_back(a);
        g2.pins.insert(g2.pins.end(), g.pins.begin(), g.pins.end());

        int nf = f.arity;
        std::vector<Elem> walk(2 * static_cast<std::size_t>(nf) + 1);
        Tuple args(static_cast<std::size_t>(nf));
        std::fill(args.begin(), args.end(), tb);
        walk[0] = f.at(n, args);
        for (int k = 0; k < nf; ++k) {
            std::fill(args.begin(), args.begin() + k, tb);
            args[k] = a;
            std::fill(args.begin() + k + 1, args.end(), tc);
            walk[2 * k + 1] = f.at(n, args);
            std::fill(args.begin(), args.begin() + k + 1, tc);
            std::fill(args.begin() + k + 1, args.end(), tb);
            walk[2 * k + 2] = f.at(n, args);
        }

        Elem loop = recurse(Rp, sub_universe, g2, walk, my, LoopFrame::Role::Restriction);
        frames[my].outcome = LoopFrame::Outcome::Delegated;
        frames[my].loop = loop;
        return loop;
    }
};

}  // namespace

LoopCertificate find_loop_constructive(const Relation& R, const OperationTable& f,
                                       const LoopOptions& opts) {
    require_binary(R, "find_loop_constructive");
    if (!R.is_symmetric()) throw Error("loop search needs a symmetric relation");
    if (f.arity < 1) throw Error("loop search needs an operation of arity >= 1");
    int n = R.universe;

    std::vector<Elem> cycle;
    if (opts.start_cycle) {
        cycle = *opts.start_cycle;
    } else {
        // Prefer an odd closed walk that is not itself a loop, so the
        // recursion demonstrates something; fall back to a loop vertex.
        Relation stripped = R;
        for (int v = 0; v < n; ++v) {
            Tuple t{static_cast<Elem>(v), static_cast<Elem>(v)};
            std::size_t i = stripped.index(t);
            if (stripped.bits[i]) {
                stripped.bits[i] = false;
                --stripped.count;
            }
        }
        if (auto walk = find_odd_closed_walk(stripped)) {
            cycle = *walk;
        } else if (auto v = find_any_loop(R)) {
            cycle = {*v};
        } else {
            throw Error("relation has no odd closed walk");
        }
    }

    std::vector<Elem> universe(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) universe[static_cast<std::size_t>(v)] = static_cast<Elem>(v);

    LoopSearch search{f, n, opts, {}};
    Elem loop = search.recurse(R, universe, PinnedOp{&f, {}}, cycle, -1, LoopFrame::Role::Root);
    LoopCertificate cert;
    cert.loop = loop;
    cert.frames = std::move(search.frames);
    return cert;
}

LoopCertificate find_loop(const Relation& R, const OperationTable& f, LoopMode mode,
                          const LoopOptions& opts) {
    require_binary(R, "find_loop");
    int n = R.universe;
    switch (mode) {
        case LoopMode::NearUnanimity: {
            auto shape = check_shape(f, n, Shape::NearUnanimity);
            if (!shape.ok) {
                std::ostringstream os;
                os << "near unanimity check failed at (";
                for (std::size_t i = 0; i < shape.counterexample.size(); ++i)
                    os << (i ? "," : "") << shape.counterexample[i];
                os << ")";
                throw Error(os.str());
            }
            auto comp = compatible(f, R);
            if (!comp.ok) throw Error("operation is not compatible with the relation");
            break;
        }
        case LoopMode::Absorbing: {
            if (!check_shape(f, n, Shape::Idempotent).ok)
                throw Error("absorbing mode needs an idempotent operation");
            auto abs = relation_absorbs_square(R, f);
            if (!abs.ok) {
                std::ostringstream os;
                os << "relation does not absorb the square: image (" << abs.image[0] << ","
                   << abs.image[1] << ") escapes";
                throw Error(os.str());
            }
            break;
        }
        case LoopMode::Lemma: {
            auto comp = compatible(f, R);
            if (!comp.ok) throw Error("operation is not compatible with the relation");
            auto rep = produces_enough_absorption(R, f);
            if (!rep.ok) {
                std::ostringstream os;
                os << "relation does not produce enough absorption at vertex " << rep.vertex;
                throw Error(os.str());
            }
            break;
        }
    }
    return find_loop_constructive(R, f, opts);
}

void validate_loop_preconditions(const Relation& R, const std::vector<Elem>& universe,
                                 const OperationTable& f, const PinnedOp& g,
                                 const std::vector<Elem>& cycle, std::uint64_t budget) {
    require_binary(R, "validate_loop_preconditions");
    int n = R.universe;
    auto mask = member_mask(n, universe);
    if (!R.is_symmetric()) throw Error("loop precondition: relation is not symmetric");
    for (const Tuple& t : R.tuples())
        if (!mask[t[0]] || !mask[t[1]])
            throw Error("loop precondition: relation leaves the universe");

    // (1) odd closed walk
    check_cycle(R, mask, cycle);

    // (2) f compatible with R
    auto comp = compatible(f, R, budget);
    if (!comp.ok) throw Error("loop precondition (2): f is not compatible");

    // (3) enough absorption wrt f
    auto abs_f = produces_enough_absorption(R, f, budget);
    if (!abs_f.ok) throw Error("loop precondition (3): not enough absorption wrt f");

    // (4) whenever all (x_i, y_i) are edges, (g(x prefix), f(y)) is an edge
    auto rows = R.tuples();
    std::size_t nf = static_cast<std::size_t>(f.arity);
    std::size_t mg = static_cast<std::size_t>(g.arity());
    if (mg > nf) throw Error("loop precondition (4): g is wider than f");
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < nf; ++i) {
        combos *= rows.size();
        if (combos > budget) throw CapExceeded("loop precondition (4) exceeded its budget");
    }
    std::vector<std::size_t> idx(nf, 0);
    Tuple xs(mg), ys(nf);
    if (!rows.empty()) {
        while (true) {
            for (std::size_t i = 0; i < nf; ++i) {
                if (i < mg) xs[i] = rows[idx[i]][0];
                ys[i] = rows[idx[i]][1];
            }
            Elem gx = g.apply(n, xs);
            Elem fy = f.at(n, ys);
            if (!R.edge(gx, fy)) {
                std::ostringstream os;
                os << "loop precondition (4) failed: (" << gx << "," << fy << ") is no edge";
                throw Error(os.str());
            }
            std::size_t j = nf;
            bool advanced = false;
            while (j > 0) {
                --j;
                if (++idx[j] < rows.size()) {
                    advanced = true;
                    break;
                }
                idx[j] = 0;
            }
            if (!advanced) break;
        }
    }

    // (5) enough absorption wrt g
    for (Elem x : universe) {
        auto plus = R.out_neighbors(x);
        if (plus.empty()) continue;
        std::vector<Elem> closure = plus;
        if (!std::binary_search(closure.begin(), closure.end(), x)) {
            closure.push_back(x);
            std::sort(closure.begin(), closure.end());
        }
        auto plus_mask = member_mask(n, plus);
        std::uint64_t per = static_cast<std::uint64_t>(mg) * closure.size();
        for (std::size_t i = 1; i < mg; ++i) {
            per *= plus.size();
            if (per > budget) throw CapExceeded("loop precondition (5) exceeded its budget");
        }
        Tuple args(mg);
        for (std::size_t j = 0; j < mg; ++j) {
            std::vector<std::size_t> pick(mg > 1 ? mg - 1 : 0, 0);
            while (true) {
                for (Elem y : closure) {
                    std::size_t pi = 0;
                    for (std::size_t i = 0; i < mg; ++i)
                        args[i] = i == j ? y : plus[pick[pi++]];
                    Elem val = g.apply(n, args);
                    if (!plus_mask[val]) {
                        std::ostringstream os;
                        os << "loop precondition (5) failed at vertex " << x << ": value "
                           << val << " leaves the neighborhood";
                        throw Error(os.str());
                    }
                }
                std::size_t j2 = pick.size();
                bool advanced = false;
                while (j2 > 0) {
                    --j2;
                    if (++pick[j2] < plus.size()) {
                        advanced = true;
                        break;
                    }
                    pick[j2] = 0;
                }
                if (!advanced) break;
            }
        }
    }
}

void audit_certificate(const Relation& R, const OperationTable& f,
                       const LoopCertificate& cert) {
    require_binary(R, "audit_certificate");
    if (cert.frames.empty()) throw Error("certificate audit: no frames");
    int n = R.universe;

    std::vector<Relation> rel;
    std::vector<Tuple> pins(cert.frames.size());
    std::vector<std::vector<int>> children(cert.frames.size());
    rel.reserve(cert.frames.size());

    for (std::size_t i = 0; i < cert.frames.size(); ++i) {
        const LoopFrame& fr = cert.frames[i];
        if (i == 0) {
            if (fr.parent != -1 || fr.role != LoopFrame::Role::Root)
                throw Error("certificate audit: malformed root frame");
            rel.push_back(R);
            std::vector<Elem> full(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) full[static_cast<std::size_t>(v)] = static_cast<Elem>(v);
            if (fr.universe != full)
                throw Error("certificate audit: root universe mismatch");
        } else {
            if (fr.parent < 0 || static_cast<std::size_t>(fr.parent) >= i)
                throw Error("certificate audit: parent index out of order");
            children[static_cast<std::size_t>(fr.parent)].push_back(static_cast<int>(i));
            const LoopFrame& pa = cert.frames[static_cast<std::size_t>(fr.parent)];
            const Relation& prel = rel[static_cast<std::size_t>(fr.parent)];
            if (fr.role == LoopFrame::Role::Power) {
                rel.push_back(relation_power(prel, 3));
                pins[i] = pins[static_cast<std::size_t>(fr.parent)];
                if (fr.universe != pa.universe)
                    throw Error("certificate audit: power frame changed the universe");
                std::vector<Elem> expect(pa.cycle.begin(), pa.cycle.end() - 2);
                if (fr.cycle != expect)
                    throw Error("certificate audit: power frame cycle mismatch");
            } else if (fr.role == LoopFrame::Role::Restriction) {
                Elem a = pa.tri_a, b = pa.tri_b, c = pa.tri_c;
                if (!prel.edge(a, b) || !prel.edge(b, c) || !prel.edge(c, a))
                    throw Error("certificate audit: stored triangle is missing edges");
                std::vector<Elem> sub = prel.out_neighbors(a);
                if (fr.universe != sub)
                    throw Error("certificate audit: restriction universe mismatch");
                auto sub_mask = member_mask(n, sub);
                Relation rp = Relation::empty(n, 2);
                for (Elem u : sub)
                    for (Elem v : prel.out_neighbors(u))
                        if (sub_mask[v]) rp.add_edge(u, v);
                rel.push_back(std::move(rp));
                pins[i] = Tuple{a};
                pins[i].insert(pins[i].end(), pins[static_cast<std::size_t>(fr.parent)].begin(),
                               pins[static_cast<std::size_t>(fr.parent)].end());
                int nf = f.arity;
                std::vector<Elem> walk(2 * static_cast<std::size_t>(nf) + 1);
                Tuple args(static_cast<std::size_t>(nf), b);
                walk[0] = f.at(n, args);
                for (int k = 0; k < nf; ++k) {
                    std::fill(args.begin(), args.begin() + k, b);
                    args[k] = a;
                    std::fill(args.begin() + k + 1, args.end(), c);
                    walk[2 * k + 1] = f.at(n, args);
                    std::fill(args.begin(), args.begin() + k + 1, c);
                    std::fill(args.begin() + k + 1, args.end(), b);
                    walk[2 * k + 2] = f.at(n, args);
                }
                if (fr.cycle != walk)
                    throw Error("certificate audit: restriction frame cycle mismatch");
            } else {
                throw Error("certificate audit: non-root frame with root role");
            }
        }

        const Relation& r = rel[i];
        if (fr.edges != r.count) throw Error("certificate audit: edge count mismatch");
        if (fr.g_arity != static_cast<std::size_t>(f.arity) - pins[i].size())
            throw Error("certificate audit: pinned arity mismatch");
        if (fr.l != fr.cycle.size()) throw Error("certificate audit: cycle length mismatch");
        auto mask = member_mask(n, fr.universe);
        check_cycle(r, mask, fr.cycle);
        if (!r.edge(fr.loop, fr.loop))
            throw Error("certificate audit: claimed loop is missing");

        switch (fr.outcome) {
            case LoopFrame::Outcome::CycleLoop:
                if (fr.cycle.size() != 1 || fr.loop != fr.cycle[0])
                    throw Error("certificate audit: cycle base outcome mismatch");
                break;
            case LoopFrame::Outcome::UnaryLoop: {
                if (fr.g_arity != 1)
                    throw Error("certificate audit: unary outcome at a wide frame");
                Elem x = 0;
                bool found = false;
                for (Elem v : fr.universe) {
                    if (!r.out_neighbors(v).empty()) {
                        x = v;
                        found = true;
                        break;
                    }
                }
                PinnedOp g{&f, pins[i]};
                if (!found || g.apply(n, std::span<const Elem>(&x, 1)) != fr.loop)
                    throw Error("certificate audit: unary base vertex mismatch");
                break;
            }
            case LoopFrame::Outcome::Delegated:
                break;
        }
    }

    for (std::size_t i = 0; i < cert.frames.size(); ++i) {
        const LoopFrame& fr = cert.frames[i];
        if (fr.outcome == LoopFrame::Outcome::Delegated) {
            if (children[i].size() != 2)
                throw Error("certificate audit: delegated frame without two children");
            const LoopFrame& pw = cert.frames[static_cast<std::size_t>(children[i][0])];
            const LoopFrame& rs = cert.frames[static_cast<std::size_t>(children[i][1])];
            if (pw.role != LoopFrame::Role::Power || rs.role != LoopFrame::Role::Restriction)
                throw Error("certificate audit: delegated children out of order");
            if (pw.loop != fr.tri_a)
                throw Error("certificate audit: triangle apex is not the power loop");
            if (rs.loop != fr.loop)
                throw Error("certificate audit: delegated loop mismatch");
            // The stored triangle must be the first one in scan order.
            const Relation& r = rel[i];
            bool hit = false;
            for (Elem b : r.out_neighbors(fr.tri_a)) {
                for (Elem c : r.out_neighbors(b)) {
                    if (r.edge(c, fr.tri_a)) {
                        if (b != fr.tri_b || c != fr.tri_c)
                            throw Error("certificate audit: triangle is not the first one");
                        hit = true;
                        break;
                    }
                }
                if (hit) break;
            }
            if (!hit) throw Error("certificate audit: no triangle at a delegated frame");
        } else if (!children[i].empty()) {
            throw Error("certificate audit: base frame with children");
        }
    }

    if (cert.loop != cert.frames[0].loop)
        throw Error("certificate audit: final loop disagrees with the root frame");
}

SquareAbsorption relation_absorbs_square(const Relation& R, const OperationTable& op,
                                         std::uint64_t budget) {
    require_binary(R, "relation_absorbs_square");
    int n = R.universe;
    std::size_t k = static_cast<std::size_t>(op.arity);
    auto rows = R.tuples();
    SquareAbsorption out;
    if (rows.empty()) return out;

    std::uint64_t combos = static_cast<std::uint64_t>(k) * n * n;
    for (std::size_t i = 1; i < k; ++i) {
        combos *= rows.size();
        if (combos > budget) throw CapExceeded("square absorption check exceeded its budget");
    }

    Tuple firsts(k), seconds(k);
    for (std::size_t ex = 0; ex < k; ++ex) {
        std::vector<std::size_t> pick(k > 1 ? k - 1 : 0, 0);
        while (true) {
            for (int x = 0; x < n; ++x) {
                for (int y = 0; y < n; ++y) {
                    std::size_t pi = 0;
                    for (std::size_t i = 0; i < k; ++i) {
                        if (i == ex) {
                            firsts[i] = static_cast<Elem>(x);
                            seconds[i] = static_cast<Elem>(y);
                        } else {
                            firsts[i] = rows[pick[pi]][0];
                            seconds[i] = rows[pick[pi]][1];
                            ++pi;
                        }
                    }
                    Elem a = op.at(n, firsts);
                    Elem b = op.at(n, seconds);
                    if (!R.edge(a, b)) {
                        out.ok = false;
                        out.rows.clear();
                        for (std::size_t i = 0; i < k; ++i)
                            out.rows.push_back(Tuple{firsts[i], seconds[i]});
                        out.image = Tuple{a, b};
                        return out;
                    }
                }
            }
            std::size_t j = pick.size();
            bool advanced = false;
            while (j > 0) {
                --j;
                if (++pick[j] < rows.size()) {
                    advanced = true;
                    break;
                }
                pick[j] = 0;
            }
            if (!advanced) break;
        }
    }
    return out;
}

}  // namespace malt
