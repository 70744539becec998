#include "gfp/lower_bound.hpp"

#include <algorithm>

#include "gfp/error.hpp"
#include "gfp/sched_tests.hpp"

namespace gfp {

namespace {

void check_parameters(int processors, const Rational& epsilon)
{
    if (processors < 2)
        throw Error(ErrorCode::InvalidSystem, "M must be >= 2");
    if (epsilon.sign() <= 0 || epsilon > Rational(1) || !(Rational(1) / epsilon).is_integer())
        throw Error(ErrorCode::InvalidArgument, "1/epsilon must be a positive integer (epsilon=" + epsilon.str() + ")");
}

} // namespace

TaskSystem counterexample_taskset(int processors, const Rational& epsilon)
{
    check_parameters(processors, epsilon);
    const Rational one(1);
    std::vector<SporadicTask> tasks;
    int id = 0;
    for (int i = 0; i < processors; ++i)
        tasks.emplace_back(id++, epsilon / 3, one, Period(epsilon));
    for (int i = 0; i < processors; ++i)
        tasks.emplace_back(id++, Rational(1, 3), one, Period::infinite());
    tasks.emplace_back(id, (one + epsilon) / 3, one, Period::infinite());
    return assign_priorities(std::move(tasks), PriorityPolicy::DeadlineMonotonic, processors);
}

Rational semi_partitioned_speed(int processors, const Rational& epsilon)
{
    check_parameters(processors, epsilon);
    const Rational share = (Rational(1) + epsilon) / 3;
    return share + share / Rational(processors);
}

Rational implied_speedup_lower_bound(int processors, const Rational& epsilon)
{
    return Rational(1) / semi_partitioned_speed(processors, epsilon);
}

bool LowerBoundReport::all_conditions_pass() const
{
    return !conditions.empty() &&
           std::all_of(conditions.begin(), conditions.end(), [](const ConditionCheck& c) { return c.pass; });
}

LowerBoundReport verify_lower_bound_construction(int processors, const Rational& epsilon,
                                                 const std::optional<Rational>& speed)
{
    const TaskSystem sys = counterexample_taskset(processors, epsilon);
    LowerBoundReport report;
    report.speed = speed ? *speed : semi_partitioned_speed(processors, epsilon);
    const Rational& s = report.speed;
    if (s.sign() <= 0)
        throw Error(ErrorCode::InvalidArgument, "speed must be > 0");

    const Rational one(1);
    const SimTrace trace = simulate(sys, SynchronousPeriodic{one});
    const int last_id = 2 * processors;
    report.last_task_execution = executed_time(trace, last_id, 0);
    report.dm_miss_at_one = std::any_of(trace.events.begin(), trace.events.end(), [&](const SimEvent& e) {
        return e.kind == EventKind::Miss && e.task == last_id && e.job == 0 && e.time == one;
    });

    const Rational c_n = (one + epsilon) / 3;
    const Rational piece = c_n / Rational(processors);
    // One processor's share: subtask of the split task, then tau_{m+M}, then tau_m.
    const SporadicTask split_piece(0, piece, one, Period::infinite());
    const SporadicTask second(1, Rational(1, 3), one, Period::infinite());
    const auto scaled = [&](const SporadicTask& t) {
        return SporadicTask(t.id(), t.wcet() / s, max(t.deadline(), t.wcet() / s), t.period());
    };

    ConditionCheck chain{"split task chain", c_n / s, one, false};
    chain.pass = chain.value <= chain.limit;
    report.conditions.push_back(chain);

    const std::vector<SporadicTask> hp_second{scaled(split_piece)};
    ConditionCheck mid{"tau_{m+M}", bini_wcrt_bound(hp_second, Rational(1, 3) / s), one, false};
    mid.pass = mid.value <= mid.limit;
    report.conditions.push_back(mid);

    const std::vector<SporadicTask> hp_low{scaled(split_piece), scaled(second)};
    ConditionCheck low{"tau_m", bini_wcrt_bound(hp_low, (epsilon / 3) / s), one, false};
    low.pass = low.value <= low.limit;
    report.conditions.push_back(low);
    return report;
}

} // namespace gfp
