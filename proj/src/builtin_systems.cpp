#include <string>
#include <vector>

#include "malt/equations.hpp"

namespace malt {

namespace {

EquationSystem from_strings(TermPool& pool, std::initializer_list<std::pair<const char*, int>> symbols,
                            std::initializer_list<const char*> equations) {
    EquationSystem sys;
    for (const auto& [name, arity] : symbols) sys.signature.declare(name, arity);
    for (const char* text : equations)
        sys.equations.push_back(parse_equation(pool, text, sys.signature));
    return sys;
}

// Application of `symbol` to variables spelled out by an x/y string.
std::string row_app(const std::string& symbol, const std::string& row) {
    std::string s = "(" + symbol;
    for (char c : row) {
        s += ' ';
        s += c;
    }
    s += ')';
    return s;
}

std::string chain_eq(const std::string& lhs, const std::string& rhs) {
    return "(= " + lhs + " " + rhs + ")";
}

// Four rows whose columns run over every {x,y}^4 value except the four
// where both the first pair and the second pair are constant.
const char* kRow1 = "xxxxxxyyyyyy";
const char* kRow2 = "xxyyyyxxxxyy";
const char* kRow3 = "xyxxyyxxyyxy";
const char* kRow4 = "yxxyxyxyxyyx";

EquationSystem double_loop_system(TermPool& pool, bool strong) {
    EquationSystem sys;
    sys.signature.declare("d", 12);
    std::vector<std::string> rows = {kRow1, kRow2, kRow3, kRow4};
    if (strong) {
        for (int i = 0; i < 3; ++i)
            sys.equations.push_back(parse_equation(
                pool, chain_eq(row_app("d", rows[i]), row_app("d", rows[i + 1])),
                sys.signature));
    } else {
        sys.equations.push_back(parse_equation(
            pool, chain_eq(row_app("d", rows[0]), row_app("d", rows[1])), sys.signature));
        sys.equations.push_back(parse_equation(
            pool, chain_eq(row_app("d", rows[2]), row_app("d", rows[3])), sys.signature));
    }
    return sys;
}

EquationSystem wnu_system(TermPool& pool, int n) {
    if (n < 2) throw Error("wnu requires a parameter n >= 2");
    EquationSystem sys;
    sys.signature.declare("t", n);
    auto row = [&](int ypos) {  // y at 0-based position ypos, x elsewhere
        std::string r(static_cast<std::size_t>(n), 'x');
        r[static_cast<std::size_t>(ypos)] = 'y';
        return row_app("t", r);
    };
    for (int k = n - 1; k > 0; --k)
        sys.equations.push_back(
            parse_equation(pool, chain_eq(row(k), row(k - 1)), sys.signature));
    return sys;
}

EquationSystem cyclic_system(TermPool& pool, int n) {
    if (n < 2) throw Error("cyclic requires a parameter n >= 2");
    EquationSystem sys;
    sys.signature.declare("t", n);
    std::string lhs = "(t", rhs = "(t";
    for (int i = 0; i < n; ++i) {
        lhs += " x" + std::to_string(i + 1);
        rhs += " x" + std::to_string((i + 1) % n + 1);
    }
    lhs += ')';
    rhs += ')';
    sys.equations.push_back(
        parse_equation(pool, chain_eq(lhs, rhs), sys.signature));
    return sys;
}

EquationSystem idempotency_system(TermPool& pool, int n) {
    if (n < 1) throw Error("idempotency requires a parameter n >= 1");
    EquationSystem sys;
    sys.signature.declare("f", n);
    sys.equations.push_back(parse_equation(
        pool, chain_eq(row_app("f", std::string(static_cast<std::size_t>(n), 'x')), "x"),
        sys.signature));
    return sys;
}

EquationSystem terminator_system(TermPool& pool, bool strong) {
    EquationSystem sys = from_strings(pool,
                                      {{"c", 3},
                                       {"c1", 3},
                                       {"c2", 3},
                                       {"c11", 3},
                                       {"c12", 3},
                                       {"c21", 3},
                                       {"c22", 3}},
                                      {
                                          "(= (c x y x) (c1 x x y))",
                                          "(= (c y x x) (c2 x x y))",
                                          "(= (c1 x y x) (c11 x x y))",
                                          "(= (c1 y x x) (c12 x x y))",
                                          "(= (c2 x y x) (c21 x x y))",
                                          "(= (c2 y x x) (c22 x x y))",
                                          "(= (c11 x y x) (c12 x y x))",
                                          "(= (c11 y x x) (c12 y x x))",
                                          "(= (c21 x y x) (c22 x y x))",
                                          "(= (c21 y x x) (c22 y x x))",
                                      });
    if (strong)
        sys.equations.push_back(
            parse_equation(pool, "(= (c11 y x x) (c22 x y x))", sys.signature));
    return sys;
}

}  // namespace

const std::vector<std::string>& builtin_system_names() {
    static const std::vector<std::string> names = {
        "maltsev",     "associativity",      "idempotency", "wnu",
        "cyclic",      "siggers6",           "siggers4",    "double_loop",
        "strong_double_loop", "weak_3cube",  "weak_3edge",  "terminator",
        "strong_terminator",
    };
    return names;
}

EquationSystem builtin_system(TermPool& pool, const std::string& name, int param) {
    if (name == "maltsev")
        return from_strings(pool, {{"m", 3}},
                            {"(= (m x x y) y)", "(= y (m y x x))"});
    if (name == "associativity")
        return from_strings(pool, {{"n", 2}},
                            {"(= (n (n x y) z) (n x (n y z)))"});
    if (name == "idempotency") return idempotency_system(pool, param);
    if (name == "wnu") return wnu_system(pool, param);
    if (name == "cyclic") return cyclic_system(pool, param);
    if (name == "siggers6")
        return from_strings(pool, {{"s", 6}},
                            {"(= (s x y x z y z) (s y x z x z y))"});
    if (name == "siggers4")
        return from_strings(pool, {{"s", 4}},
                            {"(= (s r a r e) (s a r e a))"});
    if (name == "double_loop") return double_loop_system(pool, false);
    if (name == "strong_double_loop") return double_loop_system(pool, true);
    if (name == "weak_3cube")
        return from_strings(pool, {{"t", 6}},
                            {"(= (t x y y y x x) (t y x y x y x))",
                             "(= (t y x y x y x) (t y y x x x y))"});
    if (name == "weak_3edge")
        return from_strings(pool, {{"e", 4}},
                            {"(= (e y y x x) (e y x y x))",
                             "(= (e y x y x) (e x x x y))"});
    if (name == "terminator") return terminator_system(pool, false);
    if (name == "strong_terminator") return terminator_system(pool, true);
    throw Error("unknown builtin system '" + name + "'");
}

}  // namespace malt
