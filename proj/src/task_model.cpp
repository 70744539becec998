#include "gfp/task_model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "gfp/error.hpp"

namespace gfp {

const Rational& Period::value() const
{
    if (infinite_)
        throw Error(ErrorCode::InvalidArgument, "infinite period has no finite value");
    return value_;
}

std::vector<std::string> task_problems(const Rational& wcet, const Rational& deadline, const Period& period)
{
    std::vector<std::string> problems;
    if (wcet.sign() <= 0)
        problems.push_back("C must be > 0 (got " + wcet.str() + ")");
    if (deadline.sign() <= 0)
        problems.push_back("D must be > 0 (got " + deadline.str() + ")");
    if (period.is_finite() && period.value().sign() <= 0)
        problems.push_back("T must be > 0 (got " + period.value().str() + ")");
    if (!problems.empty())
        return problems;
    if (wcet > deadline)
        problems.push_back("C/D must be <= 1 (C=" + wcet.str() + ", D=" + deadline.str() + ")");
    if (period.is_finite() && wcet > period.value())
        problems.push_back("U = C/T must be <= 1 (C=" + wcet.str() + ", T=" + period.value().str() + ")");
    return problems;
}

SporadicTask::SporadicTask(int id, Rational wcet, Rational deadline, Period period)
    : id_(id), wcet_(std::move(wcet)), deadline_(std::move(deadline)), period_(std::move(period))
{
    if (const auto problems = task_problems(wcet_, deadline_, period_); !problems.empty()) {
        std::ostringstream msg;
        msg << "task " << id_ << ":";
        for (const auto& p : problems)
            msg << ' ' << p << ';';
        throw Error(ErrorCode::InvalidTask, msg.str());
    }
    if (period_.is_finite()) {
        utilization_ = wcet_ / period_.value();
        density_ = wcet_ / min(deadline_, period_.value());
    } else {
        density_ = wcet_ / deadline_;
    }
}

bool SporadicTask::deadline_within_period() const
{
    return period_.is_infinite() || deadline_ <= period_.value();
}

std::string_view to_string(PriorityPolicy policy)
{
    switch (policy) {
    case PriorityPolicy::DeadlineMonotonic: return "dm";
    case PriorityPolicy::SlackMonotonic: return "sm";
    case PriorityPolicy::AsGiven: return "given";
    }
    return "?";
}

std::optional<PriorityPolicy> parse_policy(std::string_view name)
{
    if (name == "dm" || name == "DM")
        return PriorityPolicy::DeadlineMonotonic;
    if (name == "sm" || name == "SM")
        return PriorityPolicy::SlackMonotonic;
    if (name == "given" || name == "as_given" || name == "AS_GIVEN")
        return PriorityPolicy::AsGiven;
    return std::nullopt;
}

TaskSystem::TaskSystem(std::vector<SporadicTask> tasks, int processors, PriorityPolicy policy)
    : tasks_(std::move(tasks)), processors_(processors), policy_(policy)
{
    if (processors_ < 2)
        throw Error(ErrorCode::InvalidSystem, "M must be >= 2 (got " + std::to_string(processors_) + ")");
    if (tasks_.empty())
        throw Error(ErrorCode::EmptyTaskList, "task system has no tasks");
    std::set<int> ids;
    for (const auto& t : tasks_)
        if (!ids.insert(t.id()).second)
            throw Error(ErrorCode::InvalidSystem, "duplicate task id " + std::to_string(t.id()));
}

bool TaskSystem::is_deadline_monotonic() const
{
    return std::is_sorted(tasks_.begin(), tasks_.end(),
                          [](const SporadicTask& a, const SporadicTask& b) { return a.deadline() < b.deadline(); });
}

TaskSystem assign_priorities(std::vector<SporadicTask> tasks, PriorityPolicy policy, int processors)
{
    if (tasks.empty())
        throw Error(ErrorCode::EmptyTaskList, "cannot assign priorities to an empty task list");
    for (const auto& t : tasks)
        if (const auto problems = task_problems(t.wcet(), t.deadline(), t.period()); !problems.empty())
            throw Error(ErrorCode::InvalidTask, "task " + std::to_string(t.id()) + ": " + problems.front());

    const auto by_key = [](auto key) {
        return [key](const SporadicTask& a, const SporadicTask& b) {
            const auto ka = key(a), kb = key(b);
            if (ka != kb)
                return ka < kb;
            return a.id() < b.id();
        };
    };
    switch (policy) {
    case PriorityPolicy::DeadlineMonotonic:
        std::sort(tasks.begin(), tasks.end(), by_key([](const SporadicTask& t) { return t.deadline(); }));
        break;
    case PriorityPolicy::SlackMonotonic:
        std::sort(tasks.begin(), tasks.end(),
                  by_key([](const SporadicTask& t) { return t.deadline() - t.wcet(); }));
        break;
    case PriorityPolicy::AsGiven:
        break;
    }
    return TaskSystem(std::move(tasks), processors, policy);
}

mpz_class time_grain(std::span<const SporadicTask> tasks)
{
    mpz_class g = 1;
    const auto fold = [&](const Rational& r) { mpz_lcm(g.get_mpz_t(), g.get_mpz_t(), r.denominator().get_mpz_t()); };
    for (const auto& t : tasks) {
        fold(t.wcet());
        fold(t.deadline());
        if (t.has_finite_period())
            fold(t.period().value());
    }
    return g;
}

std::optional<Rational> finite_hyperperiod(std::span<const SporadicTask> tasks, const mpz_class& grain,
                                           std::uint64_t grain_limit)
{
    const Rational limit = Rational(mpz_class(std::to_string(grain_limit)), grain);
    std::optional<Rational> hp;
    for (const auto& t : tasks) {
        if (!t.has_finite_period())
            continue;
        hp = hp ? lcm(*hp, t.period().value()) : t.period().value();
        if (*hp > limit)
            return std::nullopt;
    }
    return hp ? hp : std::optional<Rational>(Rational(1));
}

DerivedStats derived_stats(const TaskSystem& sys, std::size_t index, std::uint64_t grain_limit)
{
    if (index >= sys.size())
        throw Error(ErrorCode::IndexOutOfRange,
                    "task index " + std::to_string(index) + " out of range [0, " + std::to_string(sys.size()) + ")");
    DerivedStats s;
    for (std::size_t i = 0; i <= index; ++i) {
        const auto& t = sys.task(i);
        s.delta_max = max(s.delta_max, t.density());
        s.total_utilization += t.utilization();
        if (i < index)
            s.u_delta_max = max(s.u_delta_max, t.utilization());
    }
    s.u_delta_max = max(s.u_delta_max, sys.task(index).density());

    const auto prefix = sys.tasks().first(index + 1);
    const bool all_finite =
        std::all_of(prefix.begin(), prefix.end(), [](const SporadicTask& t) { return t.has_finite_period(); });
    if (all_finite)
        s.hyperperiod = finite_hyperperiod(prefix, time_grain(sys.tasks()), grain_limit);
    return s;
}

} // namespace gfp
