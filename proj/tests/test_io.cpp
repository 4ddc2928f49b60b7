#include <gtest/gtest.h>

#include <string>

#include "mhb/io.hpp"
#include "support/generators.hpp"

using namespace mhb;
using namespace mhb::testing;

namespace {

const char* kMinimal = R"({
  "schema_version": "1.0",
  "outputs": [1, 6],
  "reservation_utility": 0,
  "utility": {"family": "log"},
  "actions": [
    {"name": "H", "cost": 1, "principal_beliefs": [0.25, 0.75], "agent_beliefs": [0.25, 0.75]},
    {"name": "L", "cost": 0, "principal_beliefs": [0.75, 0.25], "agent_beliefs": [0.75, 0.25]}
  ]
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

std::pair<ErrorCode, std::string> error_of(const std::string& text) {
    try {
        io::parse_problem(std::string_view(text));
    } catch (const Error& e) {
        return {e.code(), e.what()};
    }
    ADD_FAILURE() << "expected an mhb::Error";
    return {ErrorCode::InvalidArgument, ""};
}

}  // namespace

TEST(Parse, MinimalFile) {
    const auto inst = io::parse_problem(std::string_view(kMinimal));
    EXPECT_EQ(inst.states(), 2u);
    EXPECT_EQ(inst.actions().size(), 2u);
    EXPECT_EQ(inst.utility().family_name(), "log");
    EXPECT_EQ(io::parse_problem(std::string_view(io::serialize_problem(inst))), inst);
}

TEST(Parse, BeliefsOffSimplexNameActionAndVector) {
    const auto [code, msg] = error_of(replace(kMinimal, "\"agent_beliefs\": [0.25, 0.75]",
                                              "\"agent_beliefs\": [0.25, 0.74]"));
    EXPECT_EQ(code, ErrorCode::ValidationError);
    EXPECT_NE(msg.find("actions[0]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'H'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("agent_beliefs"), std::string::npos) << msg;
}

TEST(Parse, UnknownFamilyListsSupported) {
    const auto [code, msg] = error_of(replace(kMinimal, "\"log\"", "\"quadratic\""));
    EXPECT_EQ(code, ErrorCode::ParseError);
    EXPECT_NE(msg.find(std::string(io::kSupportedFamilies)), std::string::npos) << msg;
}

TEST(Parse, StructuralErrors) {
    EXPECT_EQ(error_of("{not json").first, ErrorCode::ParseError);
    EXPECT_EQ(error_of(replace(kMinimal, "\"1.0\"", "\"2.0\"")).first, ErrorCode::ParseError);
    EXPECT_EQ(error_of(replace(kMinimal, "\"outputs\": [1, 6],", "")).first, ErrorCode::ParseError);
    EXPECT_EQ(error_of(replace(kMinimal, "\"cost\": 1,", "\"cost\": \"one\",")).first,
              ErrorCode::ParseError);
    const auto [code, msg] = error_of(replace(kMinimal, "[1, 6]", "[1, 6, 7]"));
    EXPECT_EQ(code, ErrorCode::ValidationError);
    EXPECT_NE(msg.find("principal_beliefs"), std::string::npos) << msg;
    EXPECT_EQ(error_of(replace(kMinimal, "{\"family\": \"log\"}",
                               "{\"family\": \"crra\", \"parameters\": {\"gamma\": 1}}"))
                  .first,
              ErrorCode::ValidationError);
}

TEST(Parse, RoundTripAllFamilies) {
    Rng rng(61);
    std::vector<UtilityModel> models{UtilityModel::cara(1.7), UtilityModel::log(), UtilityModel::crra(0.6),
                                     UtilityModel::crra(2.2), UtilityModel::sqrt(),
                                     UtilityModel::tabulated({0.5, 1, 2, 4}, {-0.7, 0.0, 0.7, 1.4})};
    for (const auto& u : models) {
        for (int i = 0; i < 10; ++i) {
            const auto draw = random_two_action_beliefs(rng, 2 + i % 3);
            const bool negative = !u.in_range(0.5);
            std::vector<ActionSpec> acts{{"H", uniform(rng, 0.0, 0.3), draw.principal_high, draw.agent_high},
                                         {"L", 0.0, draw.principal_low, draw.agent_low}};
            std::optional<WageBox> box;
            if (i % 2) box = WageBox{uniform(rng, 0.6, 0.7), uniform(rng, 3.0, 3.5)};
            const ProblemInstance inst(increasing_outputs(rng, draw.agent_high.size()), acts,
                                       negative ? -uniform(rng, 1.0, 2.0) : uniform(rng, 0.5, 0.9), u, box);
            const auto back = io::parse_problem(std::string_view(io::serialize_problem(inst)));
            EXPECT_EQ(back, inst) << u.describe();
            EXPECT_EQ(io::serialize_problem(back), io::serialize_problem(inst));
        }
    }
}

TEST(Parse, WageDomainRoundTrips) {
    const std::string text = replace(kMinimal, "\"utility\": {\"family\": \"log\"},",
                                     "\"utility\": {\"family\": \"log\"}, \"wage_domain\": {\"min\": 0.1, "
                                     "\"max\": 50}, \"wage_box\": {\"min\": 0.2, \"max\": 40},");
    const auto inst = io::parse_problem(std::string_view(text));
    EXPECT_TRUE(inst.utility().domain_restricted());
    ASSERT_TRUE(inst.wage_box().has_value());
    EXPECT_EQ(io::parse_problem(std::string_view(io::serialize_problem(inst))), inst);
}

TEST(Grid, ListAndRange) {
    EXPECT_EQ(io::parse_grid("0.1,0.2"), (std::vector<double>{0.1, 0.2}));
    const auto g = io::parse_grid("0:1:5");
    ASSERT_EQ(g.size(), 5u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_DOUBLE_EQ(g[2], 0.5);
    EXPECT_THROW(io::parse_grid("0:1"), Error);
    EXPECT_THROW(io::parse_grid("0:1:2.5"), Error);
    EXPECT_THROW(io::parse_list("a,b"), Error);
    EXPECT_THROW(io::parse_list(""), Error);
}

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(io::number(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(io::number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Format, SweepCsvHeaderUsesStateSuffixes) {
    SweepResult r;
    r.eps_values = {0.0};
    r.wage_paths = {{1.0, 2.0, 3.0}};
    r.lambda_path = {1.0};
    r.mu_path = {0.5};
    r.power_path = {0.1};
    r.power_principal_path = {0.2};
    r.cost_path = {2.0};
    r.coincides_with_first_best = {false};
    r.failed = {false};
    r.errors = {""};
    const auto csv = io::sweep_csv(r, 3);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "eps,w_1,w_2,w_3,lambda,mu,power_agent,power_principal,cost,coincides_with_first_best,failed,"
              "error");
}
