#include "mhb/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

#include "mhb/error.hpp"

namespace mhb::io {

namespace {

[[noreturn]] void parse_error(const std::string& path, const std::string& why) {
    fail(ErrorCode::ParseError, path + ": " + why);
}

const Json& member(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) parse_error(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) parse_error(path + "." + key, "missing");
    return *it;
}

double number_at(const Json& j, const std::string& path) {
    if (!j.is_number()) parse_error(path, "expected a number");
    return j.get<double>();
}

std::string string_at(const Json& j, const std::string& path) {
    if (!j.is_string()) parse_error(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> numbers_at(const Json& j, const std::string& path) {
    if (!j.is_array()) parse_error(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Distribution distribution_at(const Json& j, const std::string& path) {
    auto probs = numbers_at(j, path);
    const auto why = simplex_violation(probs);
    if (!why.empty()) fail(ErrorCode::ValidationError, path + ": " + why);
    return Distribution(std::move(probs));
}

template <class F>
auto validated(const std::string& path, F&& make) {
    try {
        return make();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ValidationError) throw;
        fail(ErrorCode::ValidationError, path + ": " + e.what());
    }
}

UtilityModel utility_at(const Json& j) {
    const std::string path = "utility";
    const auto family = string_at(member(j, "family", path), path + ".family");
    const Json empty = Json::object();
    const Json& params = j.contains("parameters") ? j["parameters"] : empty;
    if (!params.is_object()) parse_error(path + ".parameters", "expected an object");
    const std::string ppath = path + ".parameters";
    return validated(ppath, [&] {
        if (family == "cara") {
            return UtilityModel::cara(params.contains("r") ? number_at(params["r"], ppath + ".r") : 1.0);
        }
        if (family == "log") return UtilityModel::log();
        if (family == "sqrt") return UtilityModel::sqrt();
        if (family == "crra") {
            return UtilityModel::crra(number_at(member(params, "gamma", ppath), ppath + ".gamma"));
        }
        if (family == "tabulated") {
            return UtilityModel::tabulated(
                numbers_at(member(params, "wages", ppath), ppath + ".wages"),
                numbers_at(member(params, "utilities", ppath), ppath + ".utilities"));
        }
        parse_error(path + ".family",
                    "unknown utility family '" + family + "'; supported: " +
                        std::string(kSupportedFamilies));
    });
}

Json interval_json(double lo, double hi) { return Json{{"min", lo}, {"max", hi}}; }

std::pair<double, double> interval_at(const Json& j, const std::string& path) {
    return {number_at(member(j, "min", path), path + ".min"),
            number_at(member(j, "max", path), path + ".max")};
}

template <std::size_t N>
Json vec(const std::array<double, N>& v) {
    return Json(std::vector<double>(v.begin(), v.end()));
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

ProblemInstance parse_problem(const Json& doc) {
    if (!doc.is_object()) parse_error("$", "expected an object");
    const auto version = string_at(member(doc, "schema_version", "$"), "schema_version");
    if (version != kSchemaVersion) {
        parse_error("schema_version", "unsupported version '" + version + "', expected '" +
                                          std::string(kSchemaVersion) + "'");
    }
    auto outputs = numbers_at(member(doc, "outputs", "$"), "outputs");
    const double ubar = number_at(member(doc, "reservation_utility", "$"), "reservation_utility");
    auto utility = utility_at(member(doc, "utility", "$"));
    if (doc.contains("wage_domain")) {
        const auto [lo, hi] = interval_at(doc["wage_domain"], "wage_domain");
        utility = validated("wage_domain", [&] { return utility.with_domain(lo, hi); });
    }
    std::optional<WageBox> box;
    if (doc.contains("wage_box")) {
        const auto [lo, hi] = interval_at(doc["wage_box"], "wage_box");
        box = WageBox{lo, hi};
    }
    const auto& acts = member(doc, "actions", "$");
    if (!acts.is_array()) parse_error("actions", "expected an array");
    std::vector<ActionSpec> actions;
    for (std::size_t i = 0; i < acts.size(); ++i) {
        const std::string path = "actions[" + std::to_string(i) + "]";
        const auto& a = acts[i];
        ActionSpec spec;
        spec.name = string_at(member(a, "name", path), path + ".name");
        const std::string named = path + " ('" + spec.name + "')";
        spec.cost = number_at(member(a, "cost", path), path + ".cost");
        spec.principal_beliefs =
            distribution_at(member(a, "principal_beliefs", path), named + ".principal_beliefs");
        spec.agent_beliefs = distribution_at(member(a, "agent_beliefs", path), named + ".agent_beliefs");
        actions.push_back(std::move(spec));
    }
    return ProblemInstance(std::move(outputs), std::move(actions), ubar, std::move(utility), box);
}

ProblemInstance parse_problem(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        parse_error("$", std::string("malformed JSON: ") + e.what());
    }
    return parse_problem(doc);
}

ProblemInstance load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open problem file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_problem(std::string_view(text.str()));
}

Json to_json(const ProblemInstance& inst) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["outputs"] = inst.outputs();
    doc["reservation_utility"] = inst.reservation_utility();
    const auto& u = inst.utility();
    Json util;
    util["family"] = u.family_name();
    Json params = Json::object();
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Cara>) params["r"] = f.r;
            if constexpr (std::is_same_v<T, Crra>) params["gamma"] = f.gamma;
            if constexpr (std::is_same_v<T, Tabulated>) {
                params["wages"] = f.wages;
                params["utilities"] = f.utilities;
            }
        },
        u.family());
    util["parameters"] = params;
    doc["utility"] = util;
    if (u.domain_restricted()) doc["wage_domain"] = interval_json(u.wage_domain().lo, u.wage_domain().hi);
    if (inst.wage_box()) doc["wage_box"] = interval_json(inst.wage_box()->min, inst.wage_box()->max);
    Json acts = Json::array();
    for (const auto& a : inst.actions()) {
        acts.push_back(Json{{"name", a.name},
                            {"cost", a.cost},
                            {"principal_beliefs", a.principal_beliefs.vector()},
                            {"agent_beliefs", a.agent_beliefs.vector()}});
    }
    doc["actions"] = acts;
    return doc;
}

std::string serialize_problem(const ProblemInstance& inst) { return dump(to_json(inst)); }

std::vector<double> parse_list(std::string_view spec) {
    std::vector<double> out;
    std::string item;
    std::istringstream in{std::string(spec)};
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used == 0 || used != item.size()) {
            fail(ErrorCode::ParseError, "not a number: '" + item + "'");
        }
        out.push_back(x);
    }
    if (out.empty()) fail(ErrorCode::ParseError, "empty list");
    return out;
}

std::vector<double> parse_grid(std::string_view spec) {
    if (spec.find(':') == std::string_view::npos) return parse_list(spec);
    std::string text(spec);
    for (auto& c : text) {
        if (c == ':') c = ',';
    }
    const auto parts = parse_list(text);
    if (parts.size() != 3 || parts[2] < 1 || parts[2] != std::floor(parts[2])) {
        fail(ErrorCode::ParseError, "grid spec must be lo:hi:n with integer n >= 1");
    }
    const auto n = static_cast<std::size_t>(parts[2]);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? parts[0]
                        : parts[0] + (parts[1] - parts[0]) * static_cast<double>(i) /
                                         static_cast<double>(n - 1);
    }
    if (n > 1) out.back() = parts[1];
    return out;
}

Json to_json(const FirstBestSolution& sol) {
    return Json{{"wages", sol.wages},
                {"lambda", sol.lambda},
                {"expected_cost_principal", sol.expected_cost_principal},
                {"expected_cost_agent_beliefs", sol.expected_cost_agent_beliefs},
                {"constant_wage", sol.constant_wage},
                {"ir_residual", sol.ir_residual},
                {"foc_residuals", sol.foc_residuals}};
}

Json to_json(const SecondBestSolution& sol) {
    Json ic = Json::array();
    for (std::size_t k = 0; k < sol.ic_actions.size(); ++k) {
        ic.push_back(Json{{"against", sol.ic_actions[k]},
                          {"mu", sol.mu[k]},
                          {"slack", sol.ic_slacks[k]},
                          {"binding", static_cast<bool>(sol.ic_binding[k])}});
    }
    Json j{{"target", sol.target},
           {"wages", sol.wages},
           {"utilities", sol.utilities},
           {"lambda", sol.lambda},
           {"incentive_constraints", ic},
           {"ir_residual", sol.ir_residual},
           {"expected_cost_principal", sol.expected_cost_principal},
           {"coincides_with_first_best", sol.coincides_with_first_best},
           {"foc_residuals", sol.foc_residuals},
           {"tol", sol.tol}};
    if (!sol.box_lower_multipliers.empty()) {
        j["box_lower_multipliers"] = sol.box_lower_multipliers;
        j["box_upper_multipliers"] = sol.box_upper_multipliers;
    }
    return j;
}

Json to_json(const KktReport& kkt) {
    return Json{{"stationarity", kkt.stationarity},
                {"primal_feasibility", kkt.primal_feasibility},
                {"dual_feasibility", kkt.dual_feasibility},
                {"complementary_slackness", kkt.complementary_slackness},
                {"interior", kkt.interior}};
}

Json to_json(const ActionChoice& choice) {
    Json acts = Json::array();
    for (const auto& a : choice.actions) {
        acts.push_back(Json{{"action", a.action},
                            {"revenue", a.revenue},
                            {"second_best_cost", a.second_best_cost},
                            {"first_best_cost", a.first_best_cost},
                            {"profit", a.profit},
                            {"first_best_profit", a.first_best_profit},
                            {"coincides_with_first_best", a.coincides_with_first_best}});
    }
    Json j{{"chosen", choice.chosen}, {"first_best_choice", choice.first_best_choice}, {"actions", acts}};
    if (choice.low_action_necessary_condition) {
        j["low_action_necessary_condition"] = *choice.low_action_necessary_condition;
    }
    return j;
}

Json to_json(const SweepResult& sweep, std::size_t states) {
    Json verdicts = Json::array();
    for (std::size_t s = 0; s < states && s < sweep.verdicts.size(); ++s) {
        verdicts.push_back(to_string(sweep.verdicts[s]));
    }
    Json rows = Json::array();
    for (std::size_t i = 0; i < sweep.eps_values.size(); ++i) {
        Json r{{"eps", sweep.eps_values[i]},
               {"wages", sweep.wage_paths[i]},
               {"lambda", sweep.lambda_path[i]},
               {"mu", sweep.mu_path[i]},
               {"power_agent", sweep.power_path[i]},
               {"power_principal", sweep.power_principal_path[i]},
               {"cost", sweep.cost_path[i]},
               {"coincides_with_first_best", static_cast<bool>(sweep.coincides_with_first_best[i])},
               {"failed", static_cast<bool>(sweep.failed[i])}};
        if (sweep.failed[i]) r["error"] = sweep.errors[i];
        rows.push_back(r);
    }
    return Json{{"verdicts", verdicts}, {"regime_changes", sweep.regime_changes}, {"rows", rows}};
}

Json to_json(const RegimeChange& change) {
    return Json{{"eps_star", change.eps_star},
                {"bracket", {change.lo, change.hi}},
                {"coincides_at_lo", change.coincides_at_lo},
                {"coincides_at_hi", change.coincides_at_hi}};
}

Json to_json(const SpreadComparison& cmp) {
    const auto& it = cmp.iterative;
    return Json{{"iterative",
                 {{"mode", it.mode == InnerMode::Coupled ? "coupled" : "reduced"},
                  {"m", it.m},
                  {"wages", vec(it.wages)},
                  {"lambda", it.lambda},
                  {"mu", it.mu},
                  {"total_cost", it.total_cost},
                  {"outer_foc_residual", it.foc_residual},
                  {"evaluations", it.trace.size()}}},
                {"direct",
                 {{"wages", cmp.direct.wages},
                  {"lambda", cmp.direct.lambda},
                  {"mu", cmp.direct.mu},
                  {"expected_cost_principal", cmp.direct.expected_cost_principal}}},
                {"cost_delta", cmp.cost_delta},
                {"max_wage_delta", cmp.max_wage_delta},
                {"lambda_delta", cmp.lambda_delta},
                {"mu_delta", cmp.mu_delta}};
}

Json to_json(const OracleResult& res) {
    return Json{{"cost", res.cost},
                {"utilities", res.utilities},
                {"wages", res.wages},
                {"constraint_tol", res.constraint_tol},
                {"evaluated", res.evaluated},
                {"feasible", res.feasible}};
}

Json to_json(const FigureBundle& fig) {
    Json curves = Json::array();
    for (const auto& c : fig.curves) curves.push_back(Json{{"name", c.name}, {"w1", c.w1}, {"w2", c.w2}});
    Json j{{"curves", curves},
           {"contract", {fig.contract_w1, fig.contract_w2}},
           {"ic_binding", fig.ic_binding},
           {"corner_exists", fig.corner_exists}};
    if (fig.corner_exists) j["corner"] = {fig.corner_w1, fig.corner_w2};
    return j;
}

Json to_json(const CaraSolution& sol) {
    return Json{{"wages", vec(sol.wages)},
                {"lambda", sol.lambda},
                {"mu", sol.mu},
                {"max_residual", sol.residuals.max_abs()}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string number(double x) { return fmt::format("{:.17g}", x); }

std::string sweep_csv(const SweepResult& sweep, std::size_t states) {
    std::string out = "eps";
    for (std::size_t s = 1; s <= states; ++s) out += fmt::format(",w_{}", s);
    out += ",lambda,mu,power_agent,power_principal,cost,coincides_with_first_best,failed,error\n";
    for (std::size_t i = 0; i < sweep.eps_values.size(); ++i) {
        out += number(sweep.eps_values[i]);
        for (double w : sweep.wage_paths[i]) out += "," + number(w);
        out += "," + number(sweep.lambda_path[i]) + "," + number(sweep.mu_path[i]) + "," +
               number(sweep.power_path[i]) + "," + number(sweep.power_principal_path[i]) + "," +
               number(sweep.cost_path[i]) + "," +
               (sweep.coincides_with_first_best[i] ? "1" : "0") + "," +
               (sweep.failed[i] ? "1" : "0") + "," + csv_quote(sweep.errors[i]) + "\n";
    }
    return out;
}

std::string figure_csv(const FigureBundle& fig) {
    std::string out = "curve,index,w_1,w_2\n";
    for (const auto& c : fig.curves) {
        for (std::size_t i = 0; i < c.w1.size(); ++i) {
            out += fmt::format("{},{},{},{}\n", csv_quote(c.name), i, number(c.w1[i]), number(c.w2[i]));
        }
    }
    if (fig.corner_exists) {
        out += fmt::format("corner,0,{},{}\n", number(fig.corner_w1), number(fig.corner_w2));
    }
    out += fmt::format("contract,0,{},{}\n", number(fig.contract_w1), number(fig.contract_w2));
    return out;
}

std::string trace_csv(const SpreadSolution& sol) {
    std::string out = "iteration,m,inner_cost,gap_cost,total\n";
    for (std::size_t i = 0; i < sol.trace.size(); ++i) {
        const auto& t = sol.trace[i];
        out += fmt::format("{},{},{},{},{}\n", i, number(t.m), number(t.inner_cost), number(t.gap_cost),
                           number(t.total));
    }
    return out;
}

}  // namespace mhb::io
