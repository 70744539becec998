#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gfp/rational.hpp"

namespace gfp {

/// Minimum inter-arrival time. Either a positive rational or the distinguished
/// INFINITE value used for one-shot tasks.
class Period {
public:
    Period(Rational value) : value_(std::move(value)) {}
    Period(int value) : value_(value) {}

    static Period infinite()
    {
        Period p{1};
        p.infinite_ = true;
        return p;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    /// Throws if the period is infinite.
    const Rational& value() const;

    std::string str() const { return infinite_ ? "inf" : value_.str(); }

    friend bool operator==(const Period& a, const Period& b)
    {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }

private:
    Rational value_;
    bool infinite_ = false;
};

/// One sporadic task (C, D, T). Immutable; the derived utilization and
/// density are computed once at construction.
class SporadicTask {
public:
    /// Throws Error(InvalidTask) listing every violated invariant.
    SporadicTask(int id, Rational wcet, Rational deadline, Period period);

    int id() const { return id_; }
    const Rational& wcet() const { return wcet_; }
    const Rational& deadline() const { return deadline_; }
    const Period& period() const { return period_; }

    /// C/T, zero for an infinite period.
    const Rational& utilization() const { return utilization_; }
    /// C / min{D, T}.
    const Rational& density() const { return density_; }

    bool has_finite_period() const { return period_.is_finite(); }
    /// D <= T (always true for an infinite period).
    bool deadline_within_period() const;

    /// Same timing parameters, different id.
    SporadicTask with_id(int id) const { return SporadicTask(id, wcet_, deadline_, period_); }

    friend bool operator==(const SporadicTask& a, const SporadicTask& b)
    {
        return a.id_ == b.id_ && a.wcet_ == b.wcet_ && a.deadline_ == b.deadline_ && a.period_ == b.period_;
    }

private:
    int id_;
    Rational wcet_;
    Rational deadline_;
    Period period_;
    Rational utilization_;
    Rational density_;
};

/// Invariant violations of a candidate (C, D, T); empty when valid.
std::vector<std::string> task_problems(const Rational& wcet, const Rational& deadline, const Period& period);

enum class PriorityPolicy { DeadlineMonotonic, SlackMonotonic, AsGiven };

std::string_view to_string(PriorityPolicy policy);
std::optional<PriorityPolicy> parse_policy(std::string_view name);

/// Tasks in priority order (index 0 is the highest priority) on M >= 2
/// identical processors.
class TaskSystem {
public:
    TaskSystem(std::vector<SporadicTask> tasks, int processors,
               PriorityPolicy policy = PriorityPolicy::AsGiven);

    std::span<const SporadicTask> tasks() const { return tasks_; }
    const SporadicTask& task(std::size_t index) const { return tasks_.at(index); }
    std::size_t size() const { return tasks_.size(); }
    int processors() const { return processors_; }
    PriorityPolicy policy() const { return policy_; }

    /// Tasks strictly before `index` in priority order.
    std::span<const SporadicTask> higher_priority(std::size_t index) const
    {
        return std::span<const SporadicTask>(tasks_).first(index);
    }

    /// D_0 <= D_1 <= ... <= D_{N-1}.
    bool is_deadline_monotonic() const;

private:
    std::vector<SporadicTask> tasks_;
    int processors_;
    PriorityPolicy policy_;
};

/// Orders tasks by policy. DM: ascending D; SM: ascending D - C; ties are
/// broken by ascending id. AS_GIVEN keeps the input order.
TaskSystem assign_priorities(std::vector<SporadicTask> tasks, PriorityPolicy policy, int processors);

struct DerivedStats {
    Rational delta_max;      ///< max density among tasks 0..k
    Rational u_delta_max;    ///< max{max_{i<k} U_i, delta_k}
    Rational total_utilization; ///< sum of U_i over tasks 0..k
    std::optional<Rational> hyperperiod; ///< lcm of T_0..T_k; absent if any is infinite or too large
};

/// Upper bound on hyperperiods, measured in time grains (see time_grain).
inline constexpr std::uint64_t default_hyperperiod_grain_limit = 1'000'000'000ULL;

/// Statistics over the prefix 0..index (inclusive). Throws IndexOutOfRange.
DerivedStats derived_stats(const TaskSystem& sys, std::size_t index,
                           std::uint64_t grain_limit = default_hyperperiod_grain_limit);

/// Largest g such that every C, D and finite T of the tasks is an integer
/// multiple of 1/g, i.e. the lcm of their denominators.
mpz_class time_grain(std::span<const SporadicTask> tasks);

/// lcm of the finite periods of `tasks` (infinite periods ignored; 1 if no
/// finite period). nullopt when it exceeds `grain_limit` grains, with grains
/// measured against `grain`.
std::optional<Rational> finite_hyperperiod(std::span<const SporadicTask> tasks, const mpz_class& grain,
                                           std::uint64_t grain_limit);

} // namespace gfp
