#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "waring/cli.hpp"

using namespace waring;
using io::Json;

namespace {

const std::string kInputs = std::string(WARING_SOURCE_DIR) + "/examples/inputs/";
const std::string kGolden = std::string(WARING_SOURCE_DIR) + "/tests/golden/";

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation run(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Golden files are refreshed by setting WARING_UPDATE_GOLDEN=1.
void expect_golden(const std::string& name, const std::string& actual)
{
    const std::string path = kGolden + name;
    if (const char* up = std::getenv("WARING_UPDATE_GOLDEN"); up && std::string(up) == "1") {
        std::ofstream(path) << actual;
        return;
    }
    EXPECT_EQ(actual, slurp(path)) << "golden mismatch: " << path;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override { unsetenv("WARING_LABELS_SEED"); }
};

} // namespace

TEST_F(Cli, DecomposeBinaryPairCubic)
{
    const Invocation r = run({"decompose-binary", "--form", kInputs + "pair_cubic.json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["result"]["label"], Json::parse("[1,0]"));
    EXPECT_EQ(j["version"], std::string(kVersion));
    EXPECT_TRUE(j.contains("config"));
    EXPECT_EQ(j["result"]["cubic_class"], "PairClass");
    expect_golden("decompose_binary_pair_cubic.json", r.out);
}

TEST_F(Cli, RankSumOfCubes)
{
    const Invocation r = run({"rank", "--form", kInputs + "sum_of_cubes.json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["result"]["complex_rank"], 2);
    EXPECT_EQ(j["result"]["real_rank"], 2);
    expect_golden("rank_sum_of_cubes.json", r.out);
}

TEST_F(Cli, ScaledBasisInput)
{
    const Invocation r = run({"rank", "--form", kInputs + "sum_of_cubes_scaled.json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["result"]["complex_rank"], 2);
}

TEST_F(Cli, SchemaErrorNamesPath)
{
    const Invocation r = run({"decompose-binary", "--form", kInputs + "bad_alpha.json"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("coeffs[2].alpha"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"no-such-command"}).code, 1);
    EXPECT_EQ(run({"decompose-binary"}).code, 1);
    EXPECT_EQ(run({"decompose-binary", "--form", "/nonexistent.json"}).code, 1);
    EXPECT_EQ(run({"decompose-veronese", "--form", kInputs + "sum_of_cubes.json", "--weight", "3", "--template", "1,0"}).code, 1);
    EXPECT_EQ(run({"decompose-veronese", "--form", kInputs + "sum_of_cubes.json", "--weight", "2", "--template", "x"}).code, 1);
    EXPECT_EQ(run({"rank", "--form", kInputs + "empty_conic.json"}).code, 1);
}

TEST_F(Cli, HelpPerSubcommand)
{
    for (const char* sub : {"decompose-binary", "label-hypersurface", "decompose-veronese", "rank", "survey"}) {
        const Invocation r = run({sub, "--help"});
        EXPECT_EQ(r.code, 0) << sub;
        EXPECT_NE(r.out.find("Usage"), std::string::npos) << sub;
    }
}

TEST_F(Cli, LabelHypersurface)
{
    const Invocation r = run({"label-hypersurface", "--surface", kInputs + "empty_conic.json", "--point",
                       kInputs + "origin_point.json", "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["result"]["label"], Json::parse("[1,0]"));
    EXPECT_EQ(j["seed"], 5);
    expect_golden("label_hypersurface_empty_conic.json", r.out);
    EXPECT_EQ(run({"label-hypersurface", "--surface", kInputs + "empty_conic.json", "--point",
                   kInputs + "origin_point.json", "--seed", "5"})
                  .out,
              r.out);
}

TEST_F(Cli, RetriesExhaustedExitCode)
{
    // [0,1,0] is off the double line x1^2 = 0, and every line through it meets the line twice.
    const std::string point = testing::TempDir() + "off_line.json";
    std::ofstream(point) << R"({"coords":[0,1,0]})";
    const Invocation r = run({"label-hypersurface", "--surface", kInputs + "double_line.json", "--point", point,
                       "--max-retries", "3"});
    EXPECT_EQ(r.code, 2) << r.out;
}

TEST_F(Cli, DecomposeVeroneseSuccessAndFailure)
{
    const Invocation ok = run({"decompose-veronese", "--form", kInputs + "pair_cubic.json", "--weight", "2", "--template", "1,0"});
    ASSERT_EQ(ok.code, 0) << ok.err;
    EXPECT_EQ(Json::parse(ok.out)["result"]["label"], Json::parse("[1,0]"));
    const Invocation fail =
        run({"decompose-veronese", "--form", kInputs + "sum_of_cubes.json", "--weight", "2", "--conjugate-only"});
    EXPECT_EQ(fail.code, 3);
    EXPECT_EQ(Json::parse(fail.out)["result"]["success"], false);
}

TEST_F(Cli, JoinOnTernaryQuintic)
{
    const Invocation r = run({"decompose-veronese", "--form", kInputs + "ternary_quintic.json", "--weight", "7", "--join"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["generic_rank"]["g"], 7);
    EXPECT_FALSE(j["generic_rank"]["listed_exception"].get<bool>());
    EXPECT_LE(j["result"]["residual"].get<double>(), 1e-6);
    const auto label = j["result"]["label"];
    EXPECT_EQ(2 * label[0].get<int>() + label[1].get<int>(), 7);
    EXPECT_GE(label[0].get<int>(), 1);
}

TEST_F(Cli, SeedPrecedence)
{
    const std::string cfg = kInputs + "config.json";
    const auto seed_of = [&](std::vector<std::string> extra) {
        std::vector<std::string> args{"decompose-binary", "--form", kInputs + "pair_cubic.json", "--config", cfg};
        args.insert(args.end(), extra.begin(), extra.end());
        return Json::parse(run(args).out)["seed"].get<std::uint64_t>();
    };
    EXPECT_EQ(seed_of({}), 42u);
    setenv("WARING_LABELS_SEED", "77", 1);
    EXPECT_EQ(seed_of({}), 77u);
    EXPECT_EQ(seed_of({"--seed", "9"}), 9u);
    setenv("WARING_LABELS_SEED", "abc", 1);
    EXPECT_EQ(run({"decompose-binary", "--form", kInputs + "pair_cubic.json"}).code, 1);
    unsetenv("WARING_LABELS_SEED");
}

TEST_F(Cli, SurveyDeterministicAcrossThreadsWithCsv)
{
    const std::string csv = testing::TempDir() + "hist.csv";
    const Invocation one = run({"survey", "--spec", kInputs + "survey_binary_cubic.json", "--threads", "1", "--csv", csv});
    ASSERT_EQ(one.code, 0) << one.err;
    const Invocation four = run({"survey", "--spec", kInputs + "survey_binary_cubic.json", "--threads", "4"});
    EXPECT_EQ(one.out, four.out);
    const Json j = Json::parse(one.out);
    EXPECT_EQ(j["result"]["failures"], 0);
    EXPECT_EQ(slurp(csv).rfind("kind,a,b,weight,count\n", 0), 0u);
    expect_golden("survey_binary_cubic.json", one.out);
}

TEST_F(Cli, OutputsReparseAsInputs)
{
    const Invocation r = run({"decompose-binary", "--form", kInputs + "pair_cubic.json"});
    const Json j = Json::parse(r.out);
    EXPECT_NO_THROW(io::form_from_json(j["input"]));
    EXPECT_NO_THROW(io::config_from_json(j["config"]));
}
