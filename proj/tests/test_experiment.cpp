#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gfp/error.hpp"
#include "gfp/experiment.hpp"
#include "support.hpp"

using namespace gfp;
using testing::task;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("gfpsched_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

SweepConfig small_sweep()
{
    SweepConfig c;
    c.processors = {2};
    c.tasks = 6;
    c.utilization_pct_start = 20;
    c.utilization_pct_stop = 80;
    c.utilization_pct_step = 30;
    c.sets_per_point = 8;
    c.period_ranges = {{1, 10}, {1, 100}};
    c.seed = 99;
    return c;
}

} // namespace

TEST_CASE("toml config parsing")
{
    std::istringstream in(R"(# sweep
processors = [2, 4]
tasks_per_processor = 10
utilization_pct_start = 10
utilization_pct_stop = 90
utilization_pct_step = 20
sets_per_point = 20
policy = "sm"
tests = ["t47", "t44", "exact"]
period_ranges = [[1, 10], [1, 1000]]
deadline_ratio = [1.0, 5.0]
seed = 7
ell_max = 8
)");
    const auto c = parse_sweep_config(in);
    CHECK(c.processors == std::vector<int>{2, 4});
    CHECK(c.tasks_per_processor == 10);
    CHECK(c.utilization_pct_step == 20);
    CHECK(c.policy == PriorityPolicy::SlackMonotonic);
    CHECK(c.tests == std::vector<TestId>{TestId::T47, TestId::T44, TestId::Exact});
    CHECK(c.period_ranges.size() == 2);
    CHECK(c.period_ranges[1].second == 1000);
    CHECK(c.deadline_ratio.second == 5.0);
    CHECK(c.seed == 7);
    CHECK(c.analysis.ell_max == 8);

    std::istringstream unknown("procesors = [2]\n");
    CHECK_THROWS_AS(parse_sweep_config(unknown), Error);
    std::istringstream bf_sm("policy = \"sm\"\ntests = [\"bf\"]\n");
    CHECK_THROWS_AS(parse_sweep_config(bf_sm), Error);
    std::istringstream bad_grid("utilization_pct_start = 50\nutilization_pct_stop = 10\n");
    CHECK_THROWS_AS(parse_sweep_config(bad_grid), Error);
}

TEST_CASE("empty sweep gives a header-only csv")
{
    SweepResult empty;
    empty.tests = {TestId::T47};
    const auto dir = scratch("empty");
    const auto files = emit_plot_data(empty, dir);
    REQUIRE(files.size() == 1);
    CHECK(slurp(files[0]) == "utilization_pct,test_name,acceptance_ratio\n");
    std::filesystem::remove_all(dir);
}

TEST_CASE("one point and one test give a single data row")
{
    SweepConfig c = small_sweep();
    c.tests = {TestId::T47};
    c.period_ranges = {{1, 10}};
    c.utilization_pct_start = c.utilization_pct_stop = 25;
    const auto result = run_sweep(c);
    REQUIRE(result.points.size() == 1);
    const auto dir = scratch("single");
    const auto files = emit_plot_data(result, dir);
    REQUIRE(files.size() == 1);
    const std::string text = slurp(files[0]);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.rfind("25,t47,", std::string::npos) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep ratios, union and byte-stable reruns")
{
    const auto c = small_sweep();
    const auto a = run_sweep(c);
    CHECK(a.points.size() == 6);
    CHECK(a.violations.empty());
    for (const auto& p : a.points) {
        CHECK(p.sets == c.sets_per_point);
        CHECK_FALSE(p.incomplete);
        for (TestId t : c.tests) {
            CHECK(p.ratio(t) >= 0.0);
            CHECK(p.ratio(t) <= p.ratio_any());
        }
        CHECK(p.ratio(TestId::T47) <= p.ratio(TestId::T46));
        CHECK(p.ratio(TestId::T46) == p.ratio(TestId::T45));
        CHECK(p.ratio(TestId::T45) <= p.ratio(TestId::T44));
        CHECK(p.ratio(TestId::BF) <= p.ratio(TestId::T47));
    }
    const auto dir_a = scratch("rerun_a"), dir_b = scratch("rerun_b");
    const auto files_a = emit_plot_data(a, dir_a);
    const auto files_b = emit_plot_data(run_sweep(c), dir_b);
    REQUIRE(files_a.size() == 2);
    REQUIRE(files_b.size() == 2);
    CHECK(files_a[0].filename() == "acceptance_M2_T1-10.csv");
    for (std::size_t i = 0; i < files_a.size(); ++i)
        CHECK(slurp(files_a[i]) == slurp(files_b[i]));
    CHECK(slurp(dir_a / "points.csv") == slurp(dir_b / "points.csv"));
    CHECK(std::filesystem::exists(dir_a / "acceptance_M2_T1-10.gp"));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("light and heavy extremes")
{
    SweepConfig c = small_sweep();
    c.processors = {4};
    c.tasks = 20;
    c.period_ranges = {{1, 100}};
    c.utilization_pct_start = 5;
    c.utilization_pct_stop = 100;
    c.utilization_pct_step = 95;
    c.sets_per_point = 10;
    const auto r = run_sweep(c);
    REQUIRE(r.points.size() == 2);
    CHECK(r.points[0].ratio(TestId::T44) == 1.0);
    CHECK(r.points[1].ratio(TestId::T44) == 0.0);
}

TEST_CASE("incomplete points are kept")
{
    SweepConfig c = small_sweep();
    c.tasks = 2;
    c.period_ranges = {{1, 10}};
    c.utilization_pct_start = c.utilization_pct_stop = 100;
    c.generator.resample_limit = 1;
    c.generator.utilization_denominator = 1000000;
    c.deadline_ratio = {0.8, 0.8};
    c.tests = {TestId::T47};
    const auto r = run_sweep(c);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].incomplete);
    CHECK_FALSE(r.points[0].note.empty());
}

TEST_CASE("dominance audit")
{
    const TaskSystem passes_all({task(0, "1", "4", "4"), task(1, "1", "4", "4"), task(2, "2", "10", "10")}, 2);
    const auto tests = std::vector<TestId>(all_tests().begin(), all_tests().end());
    CHECK(dominance_audit({passes_all}, tests).empty());

    CHECK(set_dominance_violations({{TestId::T47, true}, {TestId::T46, false}}, true) ==
          std::vector<std::string>{"t47 => t46"});
    CHECK(set_dominance_violations({{TestId::BF, true}, {TestId::T47, false}}, true) ==
          std::vector<std::string>{"bf => t47"});
    CHECK(set_dominance_violations({{TestId::BF, true}, {TestId::T47, false}}, false).empty());
    CHECK(set_dominance_violations({{TestId::T45, true}, {TestId::T46, false}}, false).size() == 1);
}
