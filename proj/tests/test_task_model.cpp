#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "gfp/error.hpp"
#include "gfp/lower_bound.hpp"
#include "gfp/task_model.hpp"
#include "gfp/taskset_io.hpp"
#include "support.hpp"

using namespace gfp;
using testing::R;
using testing::task;

TEST_CASE("rational parsing and formatting")
{
    CHECK(R("0.1") == Rational(1, 10));
    CHECK(R("3/6") == Rational(1, 2));
    CHECK(R("-2.5e1") == Rational(-25));
    CHECK(R("1.25e-2") == Rational(1, 80));
    CHECK(R("7") .is_integer());
    CHECK(Rational(21, 10).exact_decimal() == "2.1");
    CHECK(Rational(1, 3).exact_decimal() == "1/3");
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).ceil() == -3);
    CHECK(Rational::snap(0.3333333, 1000) == Rational(333, 1000));
    CHECK(lcm(Rational(3, 2), Rational(5, 4)) == Rational(15, 2));
    CHECK_THROWS_AS(R("1/0"), Error);
    CHECK_THROWS_AS(R("abc"), Error);
    CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
}

TEST_CASE("sporadic task invariants")
{
    const auto t = task(0, "1", "2", "4");
    CHECK(t.utilization() == Rational(1, 4));
    CHECK(t.density() == Rational(1, 2));

    const auto one_shot = task(1, "1/3", "1", "inf");
    CHECK(one_shot.utilization().is_zero());
    CHECK(one_shot.density() == Rational(1, 3));

    CHECK_THROWS_AS(task(0, "0", "1", "1"), Error);
    CHECK_THROWS_AS(task(0, "2", "1", "4"), Error);
    CHECK_THROWS_AS(task(0, "2", "4", "1"), Error);
    try {
        task(3, "-1", "0", "1");
        FAIL("expected InvalidTask");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidTask);
        const std::string msg = e.what();
        CHECK(msg.find("C must be > 0") != std::string::npos);
        CHECK(msg.find("D must be > 0") != std::string::npos);
    }
}

TEST_CASE("priority assignment")
{
    SUBCASE("deadline monotonic")
    {
        const auto sys = assign_priorities({task(0, "1", "5", "5"), task(1, "1", "3", "9")},
                                           PriorityPolicy::DeadlineMonotonic, 2);
        CHECK(sys.task(0).deadline() == Rational(3));
        CHECK(sys.task(1).deadline() == Rational(5));
        CHECK(sys.is_deadline_monotonic());
    }
    SUBCASE("slack monotonic ties broken by id")
    {
        const auto sys =
            assign_priorities({task(0, "2", "5", "5"), task(1, "1", "4", "4")}, PriorityPolicy::SlackMonotonic, 2);
        CHECK(sys.task(0).id() == 0);
        CHECK(sys.task(1).id() == 1);
    }
    SUBCASE("counterexample order")
    {
        const auto sys = counterexample_taskset(3, Rational(1, 4));
        for (std::size_t i = 0; i < sys.size(); ++i)
            CHECK(sys.task(i).id() == static_cast<int>(i));
    }
    SUBCASE("permutation property")
    {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<SporadicTask> tasks;
            for (int i = 0; i < 12; ++i)
                tasks.push_back(testing::random_task(rng, i, 4, 20, true));
            for (auto policy : {PriorityPolicy::DeadlineMonotonic, PriorityPolicy::SlackMonotonic}) {
                const auto sys = assign_priorities(tasks, policy, 3);
                std::vector<int> ids;
                for (const auto& t : sys.tasks())
                    ids.push_back(t.id());
                std::sort(ids.begin(), ids.end());
                for (int i = 0; i < 12; ++i)
                    CHECK(ids[static_cast<std::size_t>(i)] == i);
                if (policy == PriorityPolicy::DeadlineMonotonic)
                    CHECK(sys.is_deadline_monotonic());
                for (const auto& t : sys.tasks())
                    CHECK(t.density() >= t.utilization());
            }
        }
    }
    CHECK_THROWS_AS(assign_priorities({}, PriorityPolicy::DeadlineMonotonic, 2), Error);
    CHECK_THROWS_AS(TaskSystem({task(0, "1", "1", "1")}, 1), Error);
    CHECK_THROWS_AS(TaskSystem({task(0, "1", "1", "1"), task(0, "1", "2", "2")}, 2), Error);
}

TEST_CASE("derived statistics")
{
    const TaskSystem single({task(0, "1", "2", "4")}, 2);
    auto s = derived_stats(single, 0);
    CHECK(s.delta_max == Rational(1, 2));
    CHECK(s.u_delta_max == Rational(1, 2));

    const TaskSystem pair({task(0, "1", "4", "4"), task(1, "2", "10", "10")}, 2);
    s = derived_stats(pair, 1);
    CHECK(s.delta_max == Rational(1, 4));
    CHECK(s.u_delta_max == Rational(1, 4));
    CHECK(s.total_utilization == Rational(9, 20));
    REQUIRE(s.hyperperiod);
    CHECK(*s.hyperperiod == Rational(20));
    CHECK(s.u_delta_max <= s.delta_max);

    const TaskSystem one_shot({task(0, "1/3", "1", "inf"), task(1, "1", "2", "2")}, 2);
    s = derived_stats(one_shot, 1);
    CHECK(s.delta_max == Rational(1, 2));
    CHECK_FALSE(s.hyperperiod.has_value());
    CHECK(derived_stats(one_shot, 0).delta_max == Rational(1, 3));

    CHECK_THROWS_AS(derived_stats(pair, 2), Error);
    const TaskSystem huge({task(0, "1", "7919", "7919"), task(1, "1", "7907", "7907"), task(2, "1", "7901", "7901")},
                          2);
    CHECK_FALSE(derived_stats(huge, 2, 1000).hyperperiod.has_value());
}

TEST_CASE("task-set file round trip")
{
    std::istringstream in("# demo\nM 4\n1 2 4\nC=1/3 D=1 T=inf\n0.5 1.5 2 # trailing\n");
    const auto file = parse_taskset(in);
    CHECK(file.processors == 4);
    REQUIRE(file.tasks.size() == 3);
    CHECK(file.tasks[1].period().is_infinite());
    CHECK(file.tasks[2].wcet() == Rational(1, 2));

    std::ostringstream out;
    write_taskset(out, file.processors, file.tasks);
    std::istringstream again(out.str());
    const auto copy = parse_taskset(again);
    CHECK(copy.processors == 4);
    CHECK(copy.tasks == file.tasks);

    std::istringstream bad("M 2\n1 2\n");
    CHECK_THROWS_AS(parse_taskset(bad), Error);
    std::istringstream missing("1 2 3\n");
    CHECK_THROWS_AS(parse_taskset(missing), Error);
    std::istringstream invalid("M 2\n3 2 4\n");
    CHECK_THROWS_AS(parse_taskset(invalid), Error);
}
