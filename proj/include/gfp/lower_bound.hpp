#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gfp/rational.hpp"
#include "gfp/simulator.hpp"
#include "gfp/task_model.hpp"

namespace gfp {

/// The 2M+1-task system on which global DM needs speedup close to
/// 3 - 3/(M+1), in DM order with ties broken by id:
///   ids 0..M-1:   C = eps/3,       D = 1, T = eps
///   ids M..2M-1:  C = 1/3,         D = 1, T = inf
///   id  2M:       C = (1+eps)/3,   D = 1, T = inf
/// Requires M >= 2 and 1/eps a positive integer.
TaskSystem counterexample_taskset(int processors, const Rational& epsilon);

/// (1+eps)/3 + (1+eps)/(3M).
Rational semi_partitioned_speed(int processors, const Rational& epsilon);

/// 3M / ((1+eps)(M+1)), the reciprocal of semi_partitioned_speed.
Rational implied_speedup_lower_bound(int processors, const Rational& epsilon);

struct ConditionCheck {
    std::string name;
    Rational value; ///< response-time bound (or completion time) at the checked speed
    Rational limit; ///< deadline it is compared against
    bool pass = false;
};

struct LowerBoundReport {
    Rational speed;
    /// Synchronous DM simulation at speed 1 misses for the last task at t = 1.
    bool dm_miss_at_one = false;
    /// Execution the last task receives in [0, 1] at speed 1 (expected 1/3).
    Rational last_task_execution;
    std::vector<ConditionCheck> conditions;
    bool all_conditions_pass() const;
    bool passed() const { return dm_miss_at_one && all_conditions_pass(); }
};

/// Simulates the counterexample under DM at speed 1 and checks the
/// semi-partitioned schedule conditions per processor at `speed` (default
/// semi_partitioned_speed):
///   split task chain:  C_N / s <= D_N
///   tau_{m+M}:         (1/3 + C_N/M) / s <= 1
///   tau_m:             (eps/3 + 1/3 + (1+eps)/(3M)) / s <= 1
/// using the uniprocessor bound of bini_wcrt_bound.
LowerBoundReport verify_lower_bound_construction(int processors, const Rational& epsilon,
                                                 const std::optional<Rational>& speed = std::nullopt);

} // namespace gfp
