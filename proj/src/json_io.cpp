#include "malt/json_io.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "malt/error.hpp"

namespace malt {

using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

ordered_json parse_json(const std::string& text, const char* what) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string(what) + ": " + e.what());
    }
}

const ordered_json& field(const ordered_json& j, const char* key, const char* what) {
    const auto it = j.find(key);
    if (it == j.end()) throw Error(std::string(what) + ": missing \"" + key + "\"");
    return *it;
}

}  // namespace

EquationSystem system_from_json(TermPool& pool, const std::string& text) {
    const ordered_json j = parse_json(text, "equation system");
    const ordered_json& symbols = field(j, "symbols", "equation system");
    if (!symbols.is_object()) throw Error("equation system: \"symbols\" must be an object");

    Signature sig;
    for (const auto& [name, arity] : symbols.items()) {
        if (!arity.is_number_integer() || arity.get<int>() < 1)
            throw Error("equation system: arity of \"" + name + "\" must be a positive integer");
        sig.declare(name, arity.get<int>());
    }

    EquationSystem sys{sig, {}};
    const ordered_json& eqs = field(j, "equations", "equation system");
    if (!eqs.is_array()) throw Error("equation system: \"equations\" must be an array");
    for (const ordered_json& e : eqs) {
        if (!e.is_string()) throw Error("equation system: equations must be strings");
        sys.equations.push_back(parse_equation(pool, e.get<std::string>(), sig));
    }
    return sys;
}

std::string system_to_json(const TermPool& pool, const EquationSystem& sys) {
    ordered_json j;
    j["symbols"] = ordered_json::object();
    for (const auto& [name, arity] : sys.signature.symbols) j["symbols"][name] = arity;
    j["equations"] = ordered_json::array();
    for (const Equation& eq : sys.equations) j["equations"].push_back(print_equation(pool, eq));
    return j.dump();
}

FiniteAlgebra algebra_from_json(const std::string& text) {
    const ordered_json j = parse_json(text, "algebra");
    FiniteAlgebra A;
    const ordered_json& size = field(j, "size", "algebra");
    if (!size.is_number_integer() || size.get<int>() < 1)
        throw Error("algebra: \"size\" must be a positive integer");
    A.size = size.get<int>();

    const ordered_json& ops = field(j, "ops", "algebra");
    if (!ops.is_object()) throw Error("algebra: \"ops\" must be an object");
    for (const auto& [name, entry] : ops.items()) {
        OperationTable op;
        const ordered_json& arity = field(entry, "arity", "algebra");
        if (!arity.is_number_integer() || arity.get<int>() < 1)
            throw Error("algebra: arity of \"" + name + "\" must be a positive integer");
        op.arity = arity.get<int>();
        const ordered_json& table = field(entry, "table", "algebra");
        if (!table.is_array()) throw Error("algebra: table of \"" + name + "\" must be an array");
        for (const ordered_json& v : table) {
            if (!v.is_number_integer())
                throw Error("algebra: table of \"" + name + "\" must hold integers");
            op.table.push_back(static_cast<Elem>(v.get<int>()));
        }
        A.ops.emplace(name, std::move(op));
    }
    A.validate();
    return A;
}

std::string algebra_to_json(const FiniteAlgebra& A) {
    ordered_json j;
    j["size"] = A.size;
    j["ops"] = ordered_json::object();
    for (const auto& [name, op] : A.ops) {
        j["ops"][name]["arity"] = op.arity;
        j["ops"][name]["table"] = op.table;
    }
    return j.dump();
}

Relation relation_from_json(const std::string& text) {
    const ordered_json j = parse_json(text, "relation");
    const ordered_json& power = field(j, "power", "relation");
    if (!power.is_number_integer() || power.get<int>() < 1)
        throw Error("relation: \"power\" must be a positive integer");
    const ordered_json& tuples = field(j, "tuples", "relation");
    if (!tuples.is_array()) throw Error("relation: \"tuples\" must be an array");

    std::vector<Tuple> rows;
    int universe = 0;
    for (const ordered_json& t : tuples) {
        if (!t.is_array() || t.size() != static_cast<std::size_t>(power.get<int>()))
            throw Error("relation: every tuple must have \"power\" entries");
        Tuple row;
        for (const ordered_json& v : t) {
            if (!v.is_number_integer() || v.get<int>() < 0)
                throw Error("relation: tuple entries must be nonnegative integers");
            row.push_back(static_cast<Elem>(v.get<int>()));
            universe = std::max(universe, v.get<int>() + 1);
        }
        rows.push_back(std::move(row));
    }
    if (const auto it = j.find("universe"); it != j.end()) {
        if (!it->is_number_integer() || it->get<int>() < universe)
            throw Error("relation: \"universe\" must cover every tuple entry");
        universe = it->get<int>();
    }
    if (universe == 0) throw Error("relation: empty relation needs an explicit \"universe\"");

    Relation R = Relation::empty(universe, power.get<int>());
    for (const Tuple& row : rows) R.add(row);
    return R;
}

std::string relation_to_json(const Relation& R) {
    ordered_json j;
    j["universe"] = R.universe;
    j["power"] = R.power;
    j["tuples"] = ordered_json::array();
    for (const Tuple& t : R.tuples()) j["tuples"].push_back(t);
    return j.dump();
}

TermDef term_def_from_json(TermPool& pool, const std::string& text, const Signature& sig) {
    const ordered_json j = parse_json(text, "term");
    const ordered_json& params = field(j, "params", "term");
    if (!params.is_array()) throw Error("term: \"params\" must be an array");
    TermDef def;
    for (const ordered_json& p : params) {
        if (!p.is_string()) throw Error("term: params must be strings");
        def.params.push_back(p.get<std::string>());
    }
    const ordered_json& body = field(j, "body", "term");
    if (!body.is_string()) throw Error("term: \"body\" must be a string");
    def.body = parse_term(pool, body.get<std::string>(), sig);
    return def;
}

std::string term_def_to_json(const TermPool& pool, const TermDef& def) {
    ordered_json j;
    j["params"] = def.params;
    j["body"] = pool.print(def.body);
    return j.dump();
}

Signature basic_signature(const FiniteAlgebra& A) {
    Signature sig;
    for (const auto& [name, op] : A.ops) sig.declare(name, op.arity);
    return sig;
}

}  // namespace malt
