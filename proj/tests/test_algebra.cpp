#include <algorithm>
#include <array>

#include "doctest.h"
#include "malt/algebra.hpp"

using namespace malt;

namespace {

OperationTable maj_table(int n = 2) {
    return make_table(n, 3, [](std::span<const Elem> a) -> Elem {
        Tuple s(a.begin(), a.end());
        std::sort(s.begin(), s.end());
        return s[1];
    });
}

OperationTable xor3_table() {
    return make_table(2, 3, [](std::span<const Elem> a) -> Elem {
        return static_cast<Elem>(a[0] ^ a[1] ^ a[2]);
    });
}

OperationTable proj_table(int n, int arity, std::size_t coord) {
    return make_table(n, arity, [coord](std::span<const Elem> a) -> Elem { return a[coord]; });
}

FiniteAlgebra maj_algebra() {
    FiniteAlgebra A;
    A.size = 2;
    A.ops["maj"] = maj_table();
    return A;
}

std::string row_pair(const TaylorRow& r) {
    return pattern_string(r.lhs) + "|" + pattern_string(r.rhs);
}

}  // namespace

TEST_CASE("operation table layout is row-major") {
    auto p2 = proj_table(3, 2, 1);
    // index(a,b) = 3a + b; second projection's table cycles 0,1,2.
    CHECK(p2.table == std::vector<Elem>{0, 1, 2, 0, 1, 2, 0, 1, 2});
    Tuple args{2, 1};
    CHECK(OperationTable::index(3, 2, args) == 7);
    CHECK(p2.at(3, args) == 1);
    CHECK_THROWS_AS(checked_pow(12, 12, 1000), CapExceeded);
    CHECK(checked_pow(2, 10, 1024) == 1024);
}

TEST_CASE("algebra validation") {
    FiniteAlgebra A = maj_algebra();
    CHECK_NOTHROW(A.validate());
    A.ops["maj"].table.pop_back();
    CHECK_THROWS_AS(A.validate(), Error);
    A = maj_algebra();
    A.ops["maj"].table[0] = 7;
    CHECK_THROWS_AS(A.validate(), Error);
}

TEST_CASE("relation basics") {
    Relation R = Relation::empty(3, 2);
    R.add_edge(1, 2);
    R.add_edge(0, 1);
    R.add_edge(1, 0);
    R.add_edge(1, 2);
    CHECK(R.count == 3);
    CHECK(R.tuples() == std::vector<Tuple>{{0, 1}, {1, 0}, {1, 2}});
    CHECK(R.edge(1, 2));
    CHECK_FALSE(R.edge(2, 1));
    CHECK_FALSE(R.is_symmetric());
    R.add_edge(2, 1);
    CHECK(R.is_symmetric());
    CHECK(R.out_neighbors(1) == std::vector<Elem>{0, 2});
    CHECK(R.in_neighbors(0) == std::vector<Elem>{1});
    CHECK_THROWS_AS(Relation::empty(3, 30), CapExceeded);
}

TEST_CASE("shape checks with frozen counterexamples") {
    auto maj = maj_table();
    auto xor3 = xor3_table();
    CHECK(check_shape(maj, 2, Shape::Idempotent).ok);
    CHECK(check_shape(maj, 2, Shape::NearUnanimity).ok);
    CHECK(check_shape(maj, 2, Shape::WeakNearUnanimity).ok);
    CHECK(check_shape(xor3, 2, Shape::Idempotent).ok);
    CHECK(check_shape(xor3, 2, Shape::WeakNearUnanimity).ok);
    auto nu = check_shape(xor3, 2, Shape::NearUnanimity);
    CHECK_FALSE(nu.ok);
    CHECK(nu.counterexample == Tuple{0, 1});

    auto p1 = proj_table(2, 3, 0);
    auto cyc = check_shape(p1, 2, Shape::Cyclic);
    CHECK_FALSE(cyc.ok);
    CHECK(cyc.counterexample == Tuple{0, 1, 0});
    CHECK(check_shape(xor3, 2, Shape::Cyclic).ok);

    auto s4 = make_table(2, 4, [](std::span<const Elem> a) -> Elem {
        Tuple s{a[1], a[2], a[3]};
        std::sort(s.begin(), s.end());
        return s[1];
    });
    CHECK(check_shape(s4, 2, Shape::Siggers4).ok);
    auto s6 = make_table(2, 6, [](std::span<const Elem> a) -> Elem {
        return static_cast<Elem>(a[0] ^ a[3] ^ a[4]);
    });
    CHECK(check_shape(s6, 2, Shape::Siggers6).ok);
    auto p16 = proj_table(2, 6, 0);
    auto bad6 = check_shape(p16, 2, Shape::Siggers6);
    CHECK_FALSE(bad6.ok);
    CHECK(bad6.counterexample == Tuple{0, 1, 0});
    CHECK_THROWS_AS(check_shape(maj, 2, Shape::Siggers6), Error);
}

TEST_CASE("taylor operation analysis") {
    auto xr = is_taylor_operation(xor3_table(), 2);
    REQUIRE(xr.system.has_value());
    CHECK(xr.idempotent);
    CHECK(xr.system->well_formed());
    REQUIRE(xr.system->rows.size() == 3);
    CHECK(row_pair(xr.system->rows[0]) == "xxx|yxy");
    CHECK(row_pair(xr.system->rows[1]) == "xxx|xyy");
    CHECK(row_pair(xr.system->rows[2]) == "xxx|xyy");
    CHECK(xr.system->coverage == std::vector<std::size_t>{0, 1, 2});

    auto mr = is_taylor_operation(maj_table(), 2);
    REQUIRE(mr.system.has_value());
    CHECK(row_pair(mr.system->rows[0]) == "xxx|yxx");
    CHECK(row_pair(mr.system->rows[1]) == "xxx|xyx");
    CHECK(row_pair(mr.system->rows[2]) == "xxx|xxy");

    auto pr = is_taylor_operation(proj_table(2, 3, 0), 2);
    CHECK_FALSE(pr.system.has_value());
    CHECK(pr.first_uncovered == 1);
    CHECK(pr.idempotent);

    // Not idempotent but still covered: the shape is reported, the flag off.
    auto nand3 = make_table(2, 3, [](std::span<const Elem> a) -> Elem {
        return static_cast<Elem>(1 - (a[0] & a[1] & a[2]));
    });
    auto nr = is_taylor_operation(nand3, 2);
    REQUIRE(nr.system.has_value());
    CHECK_FALSE(nr.idempotent);
    CHECK(row_pair(nr.system->rows[0]) == "xxy|yxx");
    CHECK(row_pair(nr.system->rows[1]) == "xxy|xyx");
    CHECK(row_pair(nr.system->rows[2]) == "xyx|xxy");
}

TEST_CASE("term evaluation over an algebra") {
    FiniteAlgebra A = maj_algebra();
    TermPool pool;
    Signature sig;
    sig.declare("maj", 3);

    TermDef plain{{"x", "y", "z"}, parse_term(pool, "(maj x y z)", sig)};
    CHECK(eval_term(A, pool, plain).table == maj_table().table);

    TermDef nested{{"x", "y", "z"}, parse_term(pool, "(maj x (maj x y z) z)", sig)};
    CHECK(eval_term(A, pool, nested).table == maj_table().table);

    TermDef padded{{"a", "b"}, pool.variable("a")};
    CHECK(eval_term(A, pool, padded).table == proj_table(2, 2, 0).table);

    TermDef unbound{{"x"}, parse_term(pool, "(maj x y y)", sig)};
    CHECK_THROWS_AS(eval_term(A, pool, unbound), Error);

    TermDef unknown{{"x", "y"}, parse_term(pool, "(foo x y)", Signature{{{"foo", 2}}})};
    CHECK_THROWS_AS(eval_term(A, pool, unknown), Error);
}

TEST_CASE("pointwise evaluation resolves nested bindings") {
    FiniteAlgebra A = maj_algebra();
    TermPool pool;
    Signature sig;
    sig.declare("q", 2);
    Signature maj_sig;
    maj_sig.declare("maj", 3);

    std::map<std::string, TermDef> binding;
    binding["q"] = TermDef{{"a", "b"}, parse_term(pool, "(maj a a b)", maj_sig)};
    TermId t = parse_term(pool, "(q x y)", sig);
    CHECK(eval_term_at(A, pool, t, binding, {{"x", 0}, {"y", 1}}) == 0);
    CHECK(eval_term_at(A, pool, t, binding, {{"x", 1}, {"y", 0}}) == 1);
}

TEST_CASE("satisfaction of equation systems") {
    FiniteAlgebra A = maj_algebra();
    TermPool pool;
    Signature maj_sig;
    maj_sig.declare("maj", 3);

    auto wnu3 = builtin_system(pool, "wnu", 3);
    std::map<std::string, TermDef> bind_maj;
    bind_maj["t"] = TermDef{{"x1", "x2", "x3"}, parse_term(pool, "(maj x1 x2 x3)", maj_sig)};
    CHECK(satisfies(A, pool, wnu3, bind_maj).ok);

    auto cyc3 = builtin_system(pool, "cyclic", 3);
    std::map<std::string, TermDef> bind_proj;
    bind_proj["t"] = TermDef{{"a", "b", "c"}, pool.variable("a")};
    auto rep = satisfies(A, pool, cyc3, bind_proj);
    CHECK_FALSE(rep.ok);
    CHECK(rep.equation == 0);
    CHECK(rep.variables == std::vector<std::string>{"x1", "x2", "x3"});
    CHECK(rep.assignment == Tuple{0, 1, 0});
    CHECK(rep.lhs == 0);
    CHECK(rep.rhs == 1);
}

TEST_CASE("two-equation normalization transfers satisfaction") {
    // e(z1,z2,z3,z4) := maj(z2,z3,z4) satisfies the 4-ary two-equation
    // system; plugging its columns into the canonical slots must satisfy
    // the 12-ary system.
    FiniteAlgebra A = maj_algebra();
    TermPool pool;
    Signature maj_sig;
    maj_sig.declare("maj", 3);

    auto edge_sys = builtin_system(pool, "weak_3edge");
    std::map<std::string, TermDef> bind_e;
    bind_e["e"] = TermDef{{"z1", "z2", "z3", "z4"}, parse_term(pool, "(maj z2 z3 z4)", maj_sig)};
    CHECK(satisfies(A, pool, edge_sys, bind_e).ok);

    auto norm = std::get<NormalizedTwoEquation>(normalize_two_equation(pool, edge_sys));
    REQUIRE(norm.matrix.slots == std::vector<int>{1, 6, 8, 12});

    // d(z1..z12) := e(z_slot(1), .., z_slot(4))
    std::vector<std::string> zs;
    std::string app = "(e";
    for (int slot : norm.matrix.slots) app += " z" + std::to_string(slot);
    app += ")";
    Signature e_sig;
    e_sig.declare("e", 4);
    TermId body = substitute_symbols(pool, parse_term(pool, app, e_sig),
                                     {{"e", bind_e["e"]}});
    for (int i = 1; i <= 12; ++i) zs.push_back("z" + std::to_string(i));
    std::map<std::string, TermDef> bind_d;
    bind_d["d"] = TermDef{zs, body};
    CHECK(satisfies(A, pool, norm.system, bind_d).ok);
}

TEST_CASE("compatibility with a relation") {
    Relation K2 = Relation::empty(2, 2);
    K2.add_edge(0, 1);
    K2.add_edge(1, 0);
    CHECK(compatible(maj_table(), K2).ok);
    CHECK(compatible(xor3_table(), K2).ok);

    Relation R = Relation::empty(2, 2);
    R.add_edge(0, 0);
    R.add_edge(0, 1);
    R.add_edge(1, 1);
    auto rep = compatible(xor3_table(), R);
    CHECK_FALSE(rep.ok);
    CHECK(rep.rows == std::vector<Tuple>{{0, 0}, {0, 1}, {1, 1}});
    CHECK(rep.image == Tuple{1, 0});

    CHECK_THROWS_AS(compatible(maj_table(), R, 10), CapExceeded);
}

TEST_CASE("absorption checks") {
    auto w = absorption_failure({0}, {0, 1}, xor3_table(), 2);
    REQUIRE(w.has_value());
    CHECK(w->coordinate == 1);
    CHECK(w->args == Tuple{1, 0, 0});
    CHECK(w->value == 1);
    CHECK_FALSE(absorption_failure({0}, {0, 1}, maj_table(), 2).has_value());

    Relation K2 = Relation::empty(2, 2);
    K2.add_edge(0, 1);
    K2.add_edge(1, 0);
    CHECK(produces_enough_absorption(K2, maj_table()).ok);
    auto bad = produces_enough_absorption(K2, xor3_table());
    CHECK_FALSE(bad.ok);
    CHECK(bad.vertex == 0);
    CHECK(bad.witness.args == Tuple{0, 1, 1});

    CHECK(semiabsorption_report(K2, maj_table()).ok);

    // The triangle has no compatible majority, so the semiabsorption report
    // flags the compatibility precheck.
    Relation K3 = Relation::empty(3, 2);
    for (Elem a = 0; a < 3; ++a)
        for (Elem b = 0; b < 3; ++b)
            if (a != b) K3.add_edge(a, b);
    auto k3rep = semiabsorption_report(K3, maj_table(3));
    CHECK_FALSE(k3rep.ok);
    CHECK_FALSE(k3rep.compatible);

    Relation loopless = Relation::empty(2, 2);
    loopless.add_edge(0, 1);
    CHECK_THROWS_AS(produces_enough_absorption(loopless, maj_table()), Error);
}

TEST_CASE("near-unanimity completion of a semiabsorbing operation") {
    auto u2 = nu_from_semiabsorbing(proj_table(2, 2, 0), 2);
    CHECK(u2.arity == 3);
    CHECK(u2.table == maj_table().table);

    auto u3 = nu_from_semiabsorbing(proj_table(3, 2, 0), 3);
    CHECK(check_shape(u3, 3, Shape::NearUnanimity).ok);
    CHECK(check_shape(u3, 3, Shape::Idempotent).ok);
    Tuple rainbow{0, 1, 2};
    CHECK(u3.at(3, rainbow) == 0);  // falls back to the padded base operation

    auto med = maj_table(3);
    CHECK(nu_from_semiabsorbing(med, 3).table == med.table);
}

TEST_CASE("symbol substitution inlines definitions") {
    TermPool pool;
    Signature sig;
    sig.declare("g", 3);
    Signature qsig;
    qsig.declare("q", 4);

    // g(y,x,z) defined as q(x,z,y,x): argument order follows the parameter
    // list, not alphabetical names.
    std::map<std::string, TermDef> defs;
    defs["g"] = TermDef{{"y", "x", "z"}, parse_term(pool, "(q x z y x)", qsig)};
    TermId t = parse_term(pool, "(g a b c)", sig);
    CHECK(pool.print(substitute_symbols(pool, t, defs)) == "(q b c a b)");

    // Nested definitions resolve transitively.
    Signature hsig;
    hsig.declare("h", 2);
    defs["h"] = TermDef{{"u", "v"}, parse_term(pool, "(g v u u)", sig)};
    TermId ht = parse_term(pool, "(h a b)", hsig);
    CHECK(pool.print(substitute_symbols(pool, ht, defs)) == "(q a a b a)");

    std::map<std::string, TermDef> cyclic;
    cyclic["p"] = TermDef{{"x"}, parse_term(pool, "(p x)", Signature{{{"p", 1}}})};
    TermId pt = parse_term(pool, "(p a)", Signature{{{"p", 1}}});
    CHECK_THROWS_AS(substitute_symbols(pool, pt, cyclic), Error);

    std::map<std::string, TermDef> wrong;
    wrong["g"] = TermDef{{"x"}, pool.variable("x")};
    CHECK_THROWS_AS(substitute_symbols(pool, t, wrong), Error);
}
