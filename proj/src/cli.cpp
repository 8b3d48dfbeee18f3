#include "malt/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "malt/algebra.hpp"
#include "malt/countermodel.hpp"
#include "malt/equations.hpp"
#include "malt/error.hpp"
#include "malt/forge.hpp"
#include "malt/json_io.hpp"
#include "malt/loops.hpp"
#include "malt/polymorphism.hpp"
#include "malt/prover.hpp"
#include "malt/term.hpp"

namespace malt {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const char* search_status_name(SearchStatus s) {
    switch (s) {
        case SearchStatus::Found: return "found";
        case SearchStatus::None: return "none";
        default: return "budget";
    }
}

// One command invocation: collects input fingerprints and summary lines,
// then renders the report in the requested format. The outcome and artifact
// fields depend only on inputs and seed; elapsed_ms is informational.
struct Run {
    Run(std::string cmd, std::string fmt, std::ostream& o)
        : command(std::move(cmd)), format(std::move(fmt)), out(o) {}

    std::string command;
    std::string format;
    std::ostream& out;
    ordered_json inputs = ordered_json::object();
    std::optional<std::uint64_t> seed;
    std::vector<std::string> summary;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    std::string load(const std::string& label, const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open " + path);
        std::ostringstream ss;
        ss << f.rdbuf();
        std::string text = ss.str();
        ordered_json entry;
        entry["path"] = path;
        entry["fnv1a"] = hex64(fnv1a(text));
        inputs[label] = std::move(entry);
        return text;
    }

    void note(std::string line) { summary.push_back(std::move(line)); }

    int emit(int code, ordered_json outcome, ordered_json artifacts = ordered_json::object()) {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start);
        if (format == "text") {
            out << command << ": exit " << code << "\n";
            for (const std::string& line : summary) out << "  " << line << "\n";
        } else {
            ordered_json rep;
            rep["command"] = command;
            rep["inputs"] = inputs;
            if (seed) rep["seed"] = *seed;
            rep["outcome"] = std::move(outcome);
            rep["artifacts"] = std::move(artifacts);
            rep["elapsed_ms"] = elapsed.count();
            out << rep.dump(2) << "\n";
        }
        return code;
    }
};

ordered_json term_json(const TermPool& pool, const TermDef& def) {
    return ordered_json::parse(term_def_to_json(pool, def));
}

const OperationTable& pick_op(const FiniteAlgebra& A, const std::string& name) {
    const auto it = A.ops.find(name);
    if (it == A.ops.end()) throw Error("algebra has no operation \"" + name + "\"");
    return it->second;
}

TermDef opaque_symbol(TermPool& pool, const std::string& symbol) {
    std::vector<std::string> params;
    std::vector<TermId> vars;
    for (int s = 1; s <= 12; ++s) {
        params.push_back("z" + std::to_string(s));
        vars.push_back(pool.variable(params.back()));
    }
    return TermDef{std::move(params), pool.apply(symbol, vars)};
}

int cmd_check_trivial(Run& run, const std::string& path, std::uint64_t cap) {
    TermPool pool;
    const EquationSystem sys = system_from_json(pool, run.load("system", path));
    try {
        const auto witness = check_trivial(pool, sys, cap);
        ordered_json outcome;
        outcome["trivial"] = witness.has_value();
        if (witness) {
            ordered_json w = ordered_json::object();
            for (const auto& [symbol, coordinate] : witness->choice) w[symbol] = coordinate;
            outcome["witness"] = std::move(w);
            run.note("trivial: satisfiable by projections");
            return run.emit(0, std::move(outcome));
        }
        run.note("not trivial");
        return run.emit(1, std::move(outcome));
    } catch (const CapExceeded& e) {
        run.note(std::string("inconclusive: ") + e.what());
        return run.emit(2, {{"trivial", nullptr}, {"reason", e.what()}});
    }
}

int cmd_is_taylor(Run& run, const std::string& algebra_path, const std::string& op_name) {
    const FiniteAlgebra A = algebra_from_json(run.load("algebra", algebra_path));
    const TaylorOperationReport rep = is_taylor_operation(pick_op(A, op_name), A.size, op_name);
    ordered_json outcome;
    outcome["taylor"] = rep.system.has_value();
    outcome["idempotent"] = rep.idempotent;
    if (rep.system) {
        ordered_json rows = ordered_json::array();
        for (const TaylorRow& r : rep.system->rows)
            rows.push_back(pattern_string(r.lhs) + " = " + pattern_string(r.rhs));
        outcome["rows"] = std::move(rows);
        run.note("taylor: yes");
        return run.emit(0, std::move(outcome));
    }
    outcome["first_uncovered"] = rep.first_uncovered;
    run.note("taylor: no, coordinate " + std::to_string(rep.first_uncovered) + " uncovered");
    return run.emit(1, std::move(outcome));
}

int cmd_find_loop(Run& run, const std::string& algebra_path, const std::string& op_name,
                  const std::string& relation_path, const std::string& mode_name,
                  std::size_t max_frames) {
    const FiniteAlgebra A = algebra_from_json(run.load("algebra", algebra_path));
    const OperationTable& op = pick_op(A, op_name);
    Relation R = relation_from_json(run.load("relation", relation_path));
    if (R.power != 2) throw Error("find-loop needs a binary relation");
    if (R.universe > A.size) throw Error("relation mentions elements outside the algebra");
    if (R.universe < A.size) {  // pad to the algebra's universe
        Relation full = Relation::empty(A.size, 2);
        for (const Tuple& t : R.tuples()) full.add(t);
        R = std::move(full);
    }
    const LoopMode mode = mode_name == "nu"          ? LoopMode::NearUnanimity
                          : mode_name == "absorbing" ? LoopMode::Absorbing
                                                     : LoopMode::Lemma;
    LoopOptions opts;
    opts.max_frames = max_frames;
    try {
        const LoopCertificate cert = find_loop(R, op, mode, opts);
        audit_certificate(R, op, cert);
        ordered_json outcome;
        outcome["loop"] = cert.loop;
        outcome["frames"] = cert.frames.size();
        ordered_json frames = ordered_json::array();
        for (const LoopFrame& f : cert.frames) {
            ordered_json fj;
            fj["role"] = f.role == LoopFrame::Role::Root    ? "root"
                         : f.role == LoopFrame::Role::Power ? "power"
                                                            : "restriction";
            fj["g_arity"] = f.g_arity;
            fj["l"] = f.l;
            fj["universe"] = f.universe.size();
            fj["cycle_length"] = f.cycle.size();
            fj["outcome"] = f.outcome == LoopFrame::Outcome::CycleLoop   ? "cycle-loop"
                            : f.outcome == LoopFrame::Outcome::UnaryLoop ? "unary-loop"
                                                                         : "delegated";
            frames.push_back(std::move(fj));
        }
        run.note("loop at " + std::to_string(cert.loop) + " after " +
                 std::to_string(cert.frames.size()) + " frames, audited");
        return run.emit(0, std::move(outcome), {{"certificate", std::move(frames)}});
    } catch (const CapExceeded& e) {
        run.note(std::string("inconclusive: ") + e.what());
        return run.emit(2, {{"loop", nullptr}, {"reason", e.what()}});
    } catch (const Error& e) {
        run.note(std::string("ineligible: ") + e.what());
        return run.emit(1, {{"loop", nullptr}, {"reason", e.what()}});
    }
}

int cmd_derive_siggers(Run& run, const std::string& algebra_path, const std::string& op_name) {
    TermPool pool;
    const FiniteAlgebra A = algebra_from_json(run.load("algebra", algebra_path));
    try {
        const SiggersForge forge = siggers_from_nu(pool, A, op_name);
        ordered_json outcome;
        outcome["status"] = "found";
        outcome["free_size"] = forge.free_size;
        outcome["pair_size"] = forge.pair_size;
        outcome["loop_vertex"] = forge.loop_vertex;
        outcome["frames"] = forge.certificate.frames.size();
        run.note("six-variable term over \"" + op_name + "\"");
        return run.emit(0, std::move(outcome), {{"term", term_json(pool, forge.term)}});
    } catch (const Error& e) {
        run.note(std::string("ineligible: ") + e.what());
        return run.emit(1, {{"status", "ineligible"}, {"reason", e.what()}});
    }
}

ordered_json double_loop_outcome(const DoubleLoopForge& forge) {
    ordered_json outcome;
    outcome["status"] = to_string(forge.status);
    outcome["closure_size"] = forge.closure_size;
    outcome["rounds"] = forge.rounds;
    outcome["binary_free_size"] = forge.binary_free_size;
    return outcome;
}

int cmd_derive_double_loop(Run& run, const std::string& algebra_path, std::size_t cap) {
    TermPool pool;
    const FiniteAlgebra A = algebra_from_json(run.load("algebra", algebra_path));
    try {
        const DoubleLoopForge forge = double_loop_from_taylor(pool, A, cap);
        ordered_json outcome = double_loop_outcome(forge);
        if (forge.status == ForgeStatus::Found) {
            run.note("12-ary paired term found");
            return run.emit(0, std::move(outcome), {{"term", term_json(pool, forge.term)}});
        }
        if (forge.status == ForgeStatus::NoWitness) {
            run.note("certified: the full closure holds no witness");
            return run.emit(1, std::move(outcome));
        }
        run.note("inconclusive: closure cap reached");
        return run.emit(2, std::move(outcome));
    } catch (const Error& e) {
        run.note(std::string("ineligible: ") + e.what());
        return run.emit(1, {{"status", "ineligible"}, {"reason", e.what()}});
    }
}

int cmd_derive_weak_3cube(Run& run, const std::string& algebra_path, std::size_t cap) {
    TermPool pool;
    const FiniteAlgebra A = algebra_from_json(run.load("algebra", algebra_path));
    try {
        const DoubleLoopForge dl = double_loop_from_taylor(pool, A, cap);
        ordered_json outcome;
        outcome["double_loop"] = double_loop_outcome(dl);
        if (dl.status != ForgeStatus::Found) {
            run.note(std::string("paired stage: ") + to_string(dl.status));
            return run.emit(dl.status == ForgeStatus::NoWitness ? 1 : 2, std::move(outcome));
        }
        const TermDef strong = strong_from_double_loop(pool, dl.term);
        const WeakCubeForge cube = weak_3cube_from_strong(pool, A, strong, cap);
        outcome["status"] = to_string(cube.status);
        outcome["closure_size"] = cube.closure_size;
        outcome["rounds"] = cube.rounds;
        if (cube.status == ForgeStatus::Found) {
            run.note("6-ary cube term found");
            return run.emit(0, std::move(outcome), {{"term", term_json(pool, cube.term)}});
        }
        run.note(std::string("cube stage: ") + to_string(cube.status));
        return run.emit(cube.status == ForgeStatus::NoWitness ? 1 : 2, std::move(outcome));
    } catch (const Error& e) {
        run.note(std::string("ineligible: ") + e.what());
        return run.emit(1, {{"status", "ineligible"}, {"reason", e.what()}});
    }
}

int cmd_derive_strong(Run& run, const std::string& symbol) {
    TermPool pool;
    const TermDef strong = strong_from_double_loop(pool, opaque_symbol(pool, symbol));
    ordered_json outcome;
    outcome["symbol"] = symbol;
    outcome["params"] = strong.params.size();
    run.note("chained composition over \"" + symbol + "\"");
    return run.emit(0, std::move(outcome), {{"term", term_json(pool, strong)}});
}

int cmd_derive_terminator(Run& run, const std::string& symbol) {
    TermPool pool;
    const TerminatorTerms tt = terminator_from_strong(pool, opaque_symbol(pool, symbol));
    ordered_json defs = ordered_json::object();
    for (const auto& [name, def] : tt.defs) defs[name] = term_json(pool, def);
    ordered_json artifacts;
    artifacts["q1"] = term_json(pool, tt.q1);
    artifacts["q2"] = term_json(pool, tt.q2);
    artifacts["defs"] = std::move(defs);
    ordered_json outcome;
    outcome["symbol"] = symbol;
    outcome["terms"] = tt.defs.size();
    run.note("seven-term family over \"" + symbol + "\"");
    return run.emit(0, std::move(outcome), std::move(artifacts));
}

int cmd_prove(Run& run, const std::string& axioms_path, const std::string& goal_path, int depth,
              std::size_t max_nodes, std::size_t max_instances) {
    TermPool pool;
    const EquationSystem axioms = system_from_json(pool, run.load("axioms", axioms_path));
    const EquationSystem goal = system_from_json(pool, run.load("goal", goal_path));
    if (goal.equations.size() != 1) throw Error("goal file must contain exactly one equation");
    const ProofReport rep =
        cc_prove(pool, axioms, goal.equations[0], depth, {max_nodes, max_instances});
    ordered_json outcome;
    outcome["status"] = to_string(rep.status);
    outcome["depth_used"] = rep.depth_used;
    outcome["universe"] = rep.universe;
    outcome["instances"] = rep.instances;
    outcome["budget_exhausted"] = rep.budget_exhausted;
    outcome["merged_class_sizes"] = rep.merged_class_sizes;
    run.note(std::string("status: ") + to_string(rep.status) + " at depth " +
             std::to_string(rep.depth_used));
    return run.emit(rep.status == ProofStatus::Proved ? 0 : 2, std::move(outcome));
}

int cmd_verify_suite(Run& run) {
    TermPool pool;
    const SuiteReport rep = verify_derivation_suite(pool);
    ordered_json checks = ordered_json::array();
    for (const SuiteCheck& c : rep.checks) {
        ordered_json cj;
        cj["suite"] = c.suite;
        cj["goal"] = c.goal;
        cj["status"] = to_string(c.status);
        cj["depth"] = c.depth;
        checks.push_back(std::move(cj));
    }
    ordered_json ablation = ordered_json::array();
    for (const AblationCheck& a : rep.ablation) {
        ordered_json aj;
        aj["goal"] = a.goal;
        aj["with_idempotency"] = to_string(a.with_idempotency);
        aj["without_idempotency"] = to_string(a.without_idempotency);
        ablation.push_back(std::move(aj));
    }
    ordered_json outcome;
    outcome["all_proved"] = rep.all_proved;
    outcome["ablation_exact"] = rep.ablation_exact;
    outcome["checks"] = std::move(checks);
    outcome["ablation"] = std::move(ablation);
    run.note(std::string("all goals proved: ") + (rep.all_proved ? "yes" : "no"));
    run.note(std::string("ablation cut exactly the cross pairs: ") +
             (rep.ablation_exact ? "yes" : "no"));
    return run.emit(rep.all_proved && rep.ablation_exact ? 0 : 2, std::move(outcome));
}

int cmd_countermodel(Run& run, const std::string& hyp_path, const std::string& goal_path,
                     int max_size, std::size_t samples, std::uint64_t seed, std::size_t cap) {
    run.seed = seed;
    TermPool pool;
    const EquationSystem hypotheses = system_from_json(pool, run.load("hypotheses", hyp_path));
    const EquationSystem goal = system_from_json(pool, run.load("goal", goal_path));
    CountermodelOptions opts;
    opts.max_size = max_size;
    opts.samples = samples;
    opts.seed = seed;
    opts.closure_cap = cap;
    const CountermodelResult res = find_countermodel(pool, hypotheses, goal, opts);
    ordered_json outcome;
    outcome["status"] = search_status_name(res.status);
    outcome["examined"] = res.examined;
    run.note(std::string("status: ") + search_status_name(res.status) + " after " +
             std::to_string(res.examined) + " candidates");
    if (res.status == SearchStatus::Found) {
        return run.emit(0, std::move(outcome),
                        {{"algebra", ordered_json::parse(algebra_to_json(*res.algebra))}});
    }
    return run.emit(res.status == SearchStatus::None ? 1 : 2, std::move(outcome));
}

int cmd_explore_conjecture(Run& run, int max_vertices, int arity, std::size_t samples,
                           std::uint64_t seed, std::uint64_t budget, bool local) {
    run.seed = seed;
    ConjectureOptions opts;
    opts.max_vertices = max_vertices;
    opts.samples = samples;
    opts.exhaustive = samples == 0;
    opts.seed = seed;
    opts.query.arity = arity;
    opts.query.idempotent = true;
    opts.query.near_unanimity = true;
    opts.query.node_budget = budget;
    opts.require_symmetric = local;
    opts.local_absorption = local;
    const ConjectureReport rep = check_loop_conjecture(opts);
    ordered_json outcome;
    outcome["explored"] = rep.explored;
    outcome["candidates"] = rep.candidates;
    outcome["confirmed"] = rep.confirmed;
    outcome["inconclusive"] = rep.inconclusive;
    ordered_json cx = ordered_json::array();
    for (const Relation& R : rep.counterexamples) cx.push_back(ordered_json::parse(relation_to_json(R)));
    outcome["counterexamples"] = std::move(cx);
    run.note(std::to_string(rep.candidates) + " candidates, " + std::to_string(rep.confirmed) +
             " confirmed, " + std::to_string(rep.inconclusive) + " inconclusive, " +
             std::to_string(rep.counterexamples.size()) + " counterexamples");
    if (!rep.counterexamples.empty()) return run.emit(1, std::move(outcome));
    if (samples == 0 && rep.inconclusive > 0) return run.emit(2, std::move(outcome));
    return run.emit(0, std::move(outcome));
}

int cmd_builtin(std::ostream& out, const std::string& format, const std::string& name,
                int param, bool list) {
    TermPool pool;
    if (list) {
        for (const std::string& n : builtin_system_names()) out << n << "\n";
        return 0;
    }
    if (name.empty()) throw Error("builtin needs a system name (or --list)");
    const EquationSystem sys = builtin_system(pool, name, param);
    if (format == "text") {
        for (const auto& [symbol, arity] : sys.signature.symbols)
            out << symbol << "/" << arity << "\n";
        for (const Equation& eq : sys.equations) out << print_equation(pool, eq) << "\n";
    } else {
        out << system_to_json(pool, sys) << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"workbench for strong Maltsev conditions over finite algebras", "malt"};
    app.require_subcommand(1);
    app.fallthrough();  // allow --format after the subcommand name
    std::string format = "json";
    app.add_option("--format", format, "report style")->check(CLI::IsMember({"json", "text"}));

    auto* sc_trivial = app.add_subcommand("check-trivial", "decide satisfiability by projections");
    std::string trivial_path;
    std::uint64_t trivial_cap = 10'000'000;
    sc_trivial->add_option("system", trivial_path, "EquationSystem JSON file")->required();
    sc_trivial->add_option("--cap", trivial_cap, "projection assignment budget");

    auto* sc_taylor =
        app.add_subcommand("is-taylor", "test an operation for a covering two-variable system");
    std::string taylor_algebra, taylor_op;
    sc_taylor->add_option("--algebra", taylor_algebra, "FiniteAlgebra JSON file")->required();
    sc_taylor->add_option("--op", taylor_op, "operation name")->required();

    auto* sc_loop =
        app.add_subcommand("find-loop", "constructive loop search on a symmetric digraph");
    std::string loop_algebra, loop_op, loop_relation, loop_mode = "lemma";
    std::size_t loop_frames = 100'000;
    sc_loop->add_option("--algebra", loop_algebra, "FiniteAlgebra JSON file")->required();
    sc_loop->add_option("--op", loop_op, "operation name")->required();
    sc_loop->add_option("--relation", loop_relation, "Relation JSON file")->required();
    sc_loop->add_option("--mode", loop_mode, "entry conditions to verify")
        ->check(CLI::IsMember({"nu", "absorbing", "lemma"}));
    sc_loop->add_option("--max-frames", loop_frames, "recursion frame budget");

    auto* sc_derive = app.add_subcommand("derive", "synthesize terms of the built-in families");
    sc_derive->require_subcommand(1);
    std::string derive_algebra, derive_op, derive_symbol = "d";
    std::size_t derive_cap = 1'000'000;
    auto* sc_siggers = sc_derive->add_subcommand(
        "siggers", "six-variable term from a near-unanimity operation");
    sc_siggers->add_option("--algebra", derive_algebra, "FiniteAlgebra JSON file")->required();
    sc_siggers->add_option("--op", derive_op, "near-unanimity operation name")->required();
    auto* sc_double = sc_derive->add_subcommand(
        "double-loop", "12-ary paired term from the algebra's clone");
    sc_double->add_option("--algebra", derive_algebra, "FiniteAlgebra JSON file")->required();
    sc_double->add_option("--cap", derive_cap, "closure element cap");
    auto* sc_cube =
        sc_derive->add_subcommand("weak-3cube", "6-ary cube term via the paired pipeline");
    sc_cube->add_option("--algebra", derive_algebra, "FiniteAlgebra JSON file")->required();
    sc_cube->add_option("--cap", derive_cap, "closure element cap");
    auto* sc_strong = sc_derive->add_subcommand(
        "strong-double-loop", "chain the paired identities over an opaque symbol");
    sc_strong->add_option("--symbol", derive_symbol, "12-ary symbol name");
    auto* sc_terminator = sc_derive->add_subcommand(
        "terminator", "seven-term family over an opaque symbol");
    sc_terminator->add_option("--symbol", derive_symbol, "12-ary symbol name");

    auto* sc_prove = app.add_subcommand("prove", "ground congruence-closure proof search");
    std::string prove_axioms, prove_goal;
    int prove_depth = 2;
    std::size_t prove_nodes = 200'000, prove_instances = 2'000'000;
    sc_prove->add_option("--axioms", prove_axioms, "EquationSystem JSON file")->required();
    sc_prove->add_option("--goal", prove_goal, "single-equation EquationSystem JSON file")
        ->required();
    sc_prove->add_option("--depth", prove_depth, "instantiation rounds");
    sc_prove->add_option("--max-nodes", prove_nodes, "subterm budget");
    sc_prove->add_option("--max-instances", prove_instances, "axiom instance budget");

    app.add_subcommand("verify-suite", "machine-check the derivation chain")->alias("suite");

    auto* sc_counter =
        app.add_subcommand("countermodel", "search finite algebras separating two conditions");
    std::string counter_hyp, counter_goal;
    int counter_max = 2;
    std::size_t counter_samples = 2000, counter_cap = 1'000'000;
    std::uint64_t counter_seed = 1;
    sc_counter->add_option("--hyp", counter_hyp, "hypothesis EquationSystem JSON file")
        ->required();
    sc_counter->add_option("--goal", counter_goal, "single-symbol EquationSystem JSON file")
        ->required();
    sc_counter->add_option("--max-size", counter_max, "largest universe to try");
    sc_counter->add_option("--samples", counter_samples, "random tables per size beyond 2");
    sc_counter->add_option("--seed", counter_seed, "sampling seed");
    sc_counter->add_option("--cap", counter_cap, "clone-slice closure cap");

    auto* sc_explore = app.add_subcommand("explore", "conjecture labs");
    sc_explore->require_subcommand(1);
    auto* sc_conjecture = sc_explore->add_subcommand(
        "loop-conjecture", "loopless candidates vs compatible shaped operations");
    int explore_vertices = 3, explore_arity = 3;
    std::size_t explore_samples = 0;
    std::uint64_t explore_seed = 1, explore_budget = 200'000;
    bool explore_local = false;
    sc_conjecture->add_option("--max-vertices", explore_vertices, "largest vertex count");
    sc_conjecture->add_option("--arity", explore_arity, "operation arity to search");
    sc_conjecture->add_option("--sample", explore_samples,
                              "sample this many digraphs at max-vertices instead of enumerating");
    sc_conjecture->add_option("--seed", explore_seed, "sampling seed");
    sc_conjecture->add_option("--budget", explore_budget, "search node budget per digraph");
    sc_conjecture->add_flag("--local", explore_local,
                            "symmetric odd-walk variant with local absorption");

    auto* sc_builtin = app.add_subcommand("builtin", "print a named built-in system");
    std::string builtin_name;
    int builtin_param = 0;
    bool builtin_list = false;
    sc_builtin->add_option("name", builtin_name, "catalog name");
    sc_builtin->add_option("--param", builtin_param, "arity for the parameterized families");
    sc_builtin->add_flag("--list", builtin_list, "list catalog names");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 3;
    }

    try {
        const auto make_run = [&](std::string command) {
            return Run(std::move(command), format, out);
        };
        if (*sc_trivial) {
            Run run = make_run("check-trivial");
            return cmd_check_trivial(run, trivial_path, trivial_cap);
        }
        if (*sc_taylor) {
            Run run = make_run("is-taylor");
            return cmd_is_taylor(run, taylor_algebra, taylor_op);
        }
        if (*sc_loop) {
            Run run = make_run("find-loop");
            return cmd_find_loop(run, loop_algebra, loop_op, loop_relation, loop_mode,
                                 loop_frames);
        }
        if (*sc_derive) {
            if (*sc_siggers) {
                Run run = make_run("derive siggers");
                return cmd_derive_siggers(run, derive_algebra, derive_op);
            }
            if (*sc_double) {
                Run run = make_run("derive double-loop");
                return cmd_derive_double_loop(run, derive_algebra, derive_cap);
            }
            if (*sc_cube) {
                Run run = make_run("derive weak-3cube");
                return cmd_derive_weak_3cube(run, derive_algebra, derive_cap);
            }
            if (*sc_strong) {
                Run run = make_run("derive strong-double-loop");
                return cmd_derive_strong(run, derive_symbol);
            }
            Run run = make_run("derive terminator");
            return cmd_derive_terminator(run, derive_symbol);
        }
        if (*sc_prove) {
            Run run = make_run("prove");
            return cmd_prove(run, prove_axioms, prove_goal, prove_depth, prove_nodes,
                             prove_instances);
        }
        if (app.got_subcommand("verify-suite")) {
            Run run = make_run("verify-suite");
            return cmd_verify_suite(run);
        }
        if (*sc_counter) {
            Run run = make_run("countermodel");
            return cmd_countermodel(run, counter_hyp, counter_goal, counter_max, counter_samples,
                                    counter_seed, counter_cap);
        }
        if (*sc_explore) {
            Run run = make_run("explore loop-conjecture");
            return cmd_explore_conjecture(run, explore_vertices, explore_arity, explore_samples,
                                          explore_seed, explore_budget, explore_local);
        }
        if (*sc_builtin) return cmd_builtin(out, format, builtin_name, builtin_param, builtin_list);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    err << "error: no command selected\n";
    return 3;
}

}  // namespace malt
