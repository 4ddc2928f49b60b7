#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mhb/error.hpp"
#include "mhb/io.hpp"

using namespace mhb;
using io::Json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
    std::string problem;
    std::string action;
    double tol = kDefaultTol;
    std::string states;
    std::string eps_grid;
    std::string eps_range;
    std::string out;
    std::string format = "json";
    std::string party = "principal";
    std::string which_action;
    std::string solver = "second-best";
    std::string mode = "coupled";
    std::string f, g;
    std::size_t keep = 0;
    std::size_t points = 0;
    std::string grid;
};

ProblemInstance load(const Options& o) {
    if (o.problem.empty()) fail(ErrorCode::InvalidArgument, "--problem is required");
    return io::load_problem(o.problem);
}

// Default target: the costliest action (first one on ties).
std::string target_of(const Options& o, const ProblemInstance& inst) {
    if (!o.action.empty()) {
        inst.index_of(o.action);
        return o.action;
    }
    const auto& acts = inst.actions();
    std::size_t best = 0;
    for (std::size_t i = 1; i < acts.size(); ++i) {
        if (acts[i].cost > acts[best].cost) best = i;
    }
    return acts[best].name;
}

std::pair<std::size_t, std::size_t> states_of(const Options& o, std::size_t n) {
    if (o.states.empty()) fail(ErrorCode::InvalidArgument, "--states s,s' is required");
    const auto v = io::parse_list(o.states);
    if (v.size() != 2) fail(ErrorCode::ParseError, "--states needs exactly two indices");
    for (double x : v) {
        if (x != std::floor(x) || x < 1 || x > static_cast<double>(n)) {
            fail(ErrorCode::IndexOrder, fmt::format("--states: indices must be integers in 1..{}", n));
        }
    }
    if (v[0] == v[1]) fail(ErrorCode::IndexOrder, "--states: s and s' must differ");
    return {static_cast<std::size_t>(v[0]) - 1, static_cast<std::size_t>(v[1]) - 1};
}

BeliefTilt tilt_of(const Options& o, const ProblemInstance& inst, const std::string& target) {
    BeliefTilt t;
    if (o.party == "principal") t.party = Party::Principal;
    else if (o.party == "agent") t.party = Party::Agent;
    else fail(ErrorCode::InvalidArgument, "--party must be principal or agent");
    t.which_action = o.which_action.empty() ? target : o.which_action;
    inst.index_of(t.which_action);
    std::tie(t.s, t.s_prime) = states_of(o, inst.states());
    return t;
}

Json mlrp_json(const Distribution& f, const Distribution& g) {
    const auto c = mlrp_compare(f, g);
    return Json{{"order", to_string(c.order)},
                {"strict", c.strict},
                {"all_strict", c.all_strict},
                {"f_fosd_dominates_g", fosd_dominates(f, g)},
                {"g_fosd_dominates_f", fosd_dominates(g, f)}};
}

Distribution distribution_flag(const std::string& text, const char* flag) {
    auto v = io::parse_list(text);
    const auto why = simplex_violation(v);
    if (!why.empty()) fail(ErrorCode::ValidationError, std::string(flag) + ": " + why);
    return Distribution(std::move(v));
}

struct Payload {
    Json json;
    std::optional<std::string> csv;
};

Payload solve_first_best_cmd(const Options& o) {
    const auto inst = load(o);
    const auto target = target_of(o, inst);
    const auto sol = solve_first_best(inst, target, o.tol);
    const auto& a = inst.action(target);
    const auto mono = classify_monotonicity(sol, mlrp_compare(a.principal_beliefs, a.agent_beliefs).order);
    auto j = io::to_json(sol);
    j["action"] = target;
    j["tol"] = o.tol;
    j["monotonicity"] = {{"trend", to_string(mono.trend)},
                         {"implied", mono.implied ? Json(to_string(*mono.implied)) : Json()},
                         {"consistent", mono.consistent}};
    return {j, std::nullopt};
}

Payload solve_second_best_cmd(const Options& o) {
    const auto inst = load(o);
    const auto target = target_of(o, inst);
    const auto sol = solve_second_best(inst, target, o.tol);
    auto j = io::to_json(sol);
    j["kkt"] = io::to_json(check_kkt(inst, sol));
    if (inst.actions().size() == 2) {
        const auto mono = monotonicity_report(sol, inst, target);
        j["monotonicity"] = {{"trend", to_string(mono.trend)},
                             {"asserted", mono.asserted ? Json(to_string(*mono.asserted)) : Json()},
                             {"consistent", mono.consistent}};
    }
    j["principal_payoff_trend"] = to_string(principal_payoff_monotonicity(sol, inst));
    return {j, std::nullopt};
}

Payload choose_action_cmd(const Options& o) {
    const auto inst = load(o);
    auto j = io::to_json(choose_action(inst, o.tol));
    j["tol"] = o.tol;
    return {j, std::nullopt};
}

SolverKind solver_of(const Options& o) {
    if (o.solver == "first-best") return SolverKind::FirstBest;
    if (o.solver == "second-best") return SolverKind::SecondBest;
    fail(ErrorCode::InvalidArgument, "--solver must be first-best or second-best");
}

Payload compstat_cmd(const Options& o) {
    const auto inst = load(o);
    const auto target = target_of(o, inst);
    const auto tilt = tilt_of(o, inst, target);
    if (o.eps_grid.empty()) fail(ErrorCode::InvalidArgument, "--eps-grid is required");
    const auto grid = io::parse_grid(o.eps_grid);
    const auto res = sweep(inst, target, tilt, grid, solver_of(o), o.tol);
    auto j = io::to_json(res, inst.states());
    j["action"] = target;
    j["tilt"] = {{"party", o.party},
                 {"which_action", tilt.which_action},
                 {"s", tilt.s + 1},
                 {"s_prime", tilt.s_prime + 1}};
    j["solver"] = o.solver;
    j["tol"] = o.tol;
    return {j, io::sweep_csv(res, inst.states())};
}

Payload detect_regime_cmd(const Options& o) {
    const auto inst = load(o);
    const auto target = target_of(o, inst);
    const auto tilt = tilt_of(o, inst, target);
    if (o.eps_range.empty()) fail(ErrorCode::InvalidArgument, "--eps-range lo,hi is required");
    const auto r = io::parse_list(o.eps_range);
    if (r.size() != 2) fail(ErrorCode::ParseError, "--eps-range needs two numbers");
    const auto change = detect_regime_change(inst, target, tilt, r[0], r[1], 1e-7, o.tol);
    auto j = io::to_json(change);
    j["action"] = target;
    j["tol"] = o.tol;
    return {j, std::nullopt};
}

Payload mlrp_cmd(const Options& o) {
    if (!o.f.empty() || !o.g.empty()) {
        const auto f = distribution_flag(o.f, "--f");
        const auto g = distribution_flag(o.g, "--g");
        if (f.size() != g.size()) fail(ErrorCode::LengthMismatch, "--f and --g differ in length");
        return {mlrp_json(f, g), std::nullopt};
    }
    const auto inst = load(o);
    Json j = Json::object();
    Json per_action = Json::array();
    for (const auto& a : inst.actions()) {
        auto e = mlrp_json(a.principal_beliefs, a.agent_beliefs);
        e["action"] = a.name;
        e["f"] = "principal_beliefs";
        e["g"] = "agent_beliefs";
        per_action.push_back(e);
    }
    j["principal_vs_agent"] = per_action;
    Json pairs = Json::array();
    const auto& acts = inst.actions();
    for (std::size_t i = 0; i < acts.size(); ++i) {
        for (std::size_t k = i + 1; k < acts.size(); ++k) {
            auto e = mlrp_json(acts[i].agent_beliefs, acts[k].agent_beliefs);
            e["f"] = acts[i].name;
            e["g"] = acts[k].name;
            pairs.push_back(e);
        }
    }
    j["agent_beliefs_across_actions"] = pairs;
    return {j, std::nullopt};
}

Payload reduce_cmd(const Options& o) {
    if (o.keep == 0) fail(ErrorCode::InvalidArgument, "--keep k is required");
    if (o.f.empty()) fail(ErrorCode::InvalidArgument, "--f is required");
    const auto f = distribution_flag(o.f, "--f");
    const auto rf = reduce_distribution(f, o.keep);
    Json j{{"keep", o.keep}, {"f", rf.vector()}};
    if (!o.g.empty()) {
        const auto g = distribution_flag(o.g, "--g");
        const auto rg = reduce_distribution(g, o.keep);
        j["g"] = rg.vector();
        j["before"] = mlrp_json(f, g);
        j["after"] = mlrp_json(rf, rg);
    }
    return {j, std::nullopt};
}

Payload iterate4_cmd(const Options& o) {
    const auto inst = load(o);
    const auto high = target_of(o, inst);
    if (inst.actions().size() != 2) fail(ErrorCode::InvalidArgument, "iterate4 needs two actions");
    const auto& low = inst.actions()[0].name == high ? inst.actions()[1].name : inst.actions()[0].name;
    InnerMode mode = InnerMode::Coupled;
    if (o.mode == "reduced") mode = InnerMode::Reduced;
    else if (o.mode != "coupled") fail(ErrorCode::InvalidArgument, "--mode must be coupled or reduced");
    const SpreadProblem sp(inst, high, low);
    const auto cmp = compare_with_direct(sp, mode, o.tol);
    auto j = io::to_json(cmp);
    j["high"] = high;
    j["low"] = low;
    j["appendix_ordering"] = sp.appendix_ordering();
    j["tol"] = o.tol;
    return {j, io::trace_csv(cmp.iterative)};
}

Payload oracle_audit_cmd(const Options& o) {
    const auto inst = load(o);
    const auto target = target_of(o, inst);
    const std::size_t points = o.points == 0 ? 200 : o.points;
    const auto sol = solve_second_best(inst, target, o.tol);
    GridSpec grid = grid_around(inst.utility(), sol.utilities, points);
    if (!o.grid.empty()) {
        const auto r = io::parse_list(o.grid);
        if (r.size() != 2) fail(ErrorCode::ParseError, "--grid needs lo,hi");
        grid.v_lo = r[0];
        grid.v_hi = r[1];
    }
    const auto oracle = brute_force_min(inst, target, grid, OracleMode::SecondBest);
    const double cv = cell_variation(inst, target, sol.utilities, grid.step());
    const double gap = sol.expected_cost_principal - oracle.cost;
    Json j{{"action", target},
           {"grid", {{"v_lo", grid.v_lo}, {"v_hi", grid.v_hi}, {"points_per_dim", points}}},
           {"solver_cost", sol.expected_cost_principal},
           {"oracle", io::to_json(oracle)},
           {"cost_gap", gap},
           {"cell_variation", cv},
           {"within_one_cell", std::abs(gap) <= cv},
           {"tol", o.tol}};
    return {j, std::nullopt};
}

Payload figure_data_cmd(const Options& o) {
    const auto inst = load(o);
    const std::size_t points = o.points == 0 ? 101 : o.points;
    const auto fig = figure_data(inst, points, o.action, o.tol);
    return {io::to_json(fig), io::figure_csv(fig)};
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moral-hazard contract solver with heterogeneous beliefs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--problem", o.problem, "Problem file (JSON)");
        c->add_option("--action", o.action, "Target action (default: the costliest)");
        c->add_option("--tol", o.tol, "Solver tolerance")->check(CLI::PositiveNumber);
        c->add_option("--out", o.out, "Output path (default: stdout)");
        c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    };
    auto tilt = [&](CLI::App* c) {
        c->add_option("--states", o.states, "Shift mass onto s from s' (1-based, \"s,s'\")");
        c->add_option("--party", o.party, "Whose beliefs move")
            ->check(CLI::IsMember({"principal", "agent"}));
        c->add_option("--which-action", o.which_action, "Action whose beliefs move (default: target)");
    };

    std::vector<std::pair<CLI::App*, Payload (*)(const Options&)>> commands;
    auto add = [&](const char* name, const char* desc, Payload (*fn)(const Options&)) {
        auto* c = app.add_subcommand(name, desc);
        common(c);
        commands.emplace_back(c, fn);
        return c;
    };
    add("solve-first-best", "First-best contract for one action", solve_first_best_cmd);
    add("solve-second-best", "Second-best contract with KKT report", solve_second_best_cmd);
    add("choose-action", "Profit-maximizing action", choose_action_cmd);
    auto* cs = add("compstat", "Belief-tilt sweep", compstat_cmd);
    tilt(cs);
    cs->add_option("--eps-grid", o.eps_grid, "\"a,b,c\" or \"lo:hi:n\"");
    cs->add_option("--solver", o.solver, "first-best or second-best")
        ->check(CLI::IsMember({"first-best", "second-best"}));
    auto* dr = add("detect-regime", "Locate where the second best stops matching the first best",
                   detect_regime_cmd);
    tilt(dr);
    dr->add_option("--eps-range", o.eps_range, "\"lo,hi\"");
    auto* ml = add("mlrp", "Likelihood-ratio comparison", mlrp_cmd);
    ml->add_option("--f", o.f, "First distribution \"p1,p2,...\"");
    ml->add_option("--g", o.g, "Second distribution");
    auto* rd = add("reduce", "Lump the top states of a distribution", reduce_cmd);
    rd->add_option("--f", o.f, "Distribution to reduce");
    rd->add_option("--g", o.g, "Optional second distribution (order check)");
    rd->add_option("--keep", o.keep, "Number of states kept");
    auto* it = add("iterate4", "Four-state spread decomposition vs direct solve", iterate4_cmd);
    it->add_option("--mode", o.mode, "coupled or reduced")->check(CLI::IsMember({"coupled", "reduced"}));
    auto* oa = add("oracle-audit", "Brute-force check of the second-best cost", oracle_audit_cmd);
    oa->add_option("--points", o.points, "Grid points per dimension (default 200)");
    oa->add_option("--grid", o.grid, "Promised-utility range \"lo,hi\"");
    auto* fd = add("figure-data", "Two-state wage-space curves", figure_data_cmd);
    fd->add_option("--points", o.points, "Samples per curve (default 101)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        Payload payload;
        for (const auto& [c, fn] : commands) {
            if (c == chosen) payload = fn(o);
        }
        std::string text;
        if (o.format == "csv") {
            if (!payload.csv) {
                fail(ErrorCode::InvalidArgument, chosen->get_name() + " has no CSV output");
            }
            text = *payload.csv;
        } else {
            text = io::dump(payload.json);
        }
        if (o.out.empty()) {
            std::cout << text;
        } else {
            write_file(o.out, text);
            Json meta{{"command", chosen->get_name()},
                      {"arguments", std::vector<std::string>(argv + 1, argv + argc)},
                      {"version", kVersion},
                      {"generated_at", utc_now()}};
            write_file(o.out + ".meta.json", io::dump(meta));
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
        return is_input_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error[Internal]: " << e.what() << "\n";
        return 1;
    }
}
