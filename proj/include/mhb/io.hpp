#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mhb/cara.hpp"
#include "mhb/compstat.hpp"
#include "mhb/first_best.hpp"
#include "mhb/oracle.hpp"
#include "mhb/problem.hpp"
#include "mhb/second_best.hpp"
#include "mhb/spread.hpp"

namespace mhb::io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1.0";
inline constexpr std::string_view kSupportedFamilies = "cara, log, crra, sqrt, tabulated";

/// Throws ParseError for malformed text or structure, ValidationError (with
/// a JSON path) when a value breaks a model invariant.
ProblemInstance parse_problem(std::string_view text);
ProblemInstance parse_problem(const Json& doc);
ProblemInstance load_problem(const std::string& path);

Json to_json(const ProblemInstance& inst);
std::string serialize_problem(const ProblemInstance& inst);

/// Parses "0.1,0.2,0.3" or "lo:hi:n" (n evenly spaced points, ends included).
std::vector<double> parse_grid(std::string_view spec);
std::vector<double> parse_list(std::string_view spec);

Json to_json(const FirstBestSolution& sol);
Json to_json(const SecondBestSolution& sol);
Json to_json(const KktReport& kkt);
Json to_json(const ActionChoice& choice);
Json to_json(const SweepResult& sweep, std::size_t states);
Json to_json(const RegimeChange& change);
Json to_json(const SpreadComparison& cmp);
Json to_json(const OracleResult& res);
Json to_json(const FigureBundle& fig);
Json to_json(const CaraSolution& sol);

/// Canonical text of a JSON payload: two-space indent and a trailing newline.
std::string dump(const Json& j);

/// Formats a double with 17 significant digits.
std::string number(double x);

std::string sweep_csv(const SweepResult& sweep, std::size_t states);
std::string figure_csv(const FigureBundle& fig);
std::string trace_csv(const SpreadSolution& sol);

}  // namespace mhb::io
