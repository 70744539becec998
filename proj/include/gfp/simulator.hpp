#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gfp/rational.hpp"
#include "gfp/task_model.hpp"

namespace gfp {

/// Every task releases at 0 and then as early as its period allows, up to
/// (excluding) the horizon.
struct SynchronousPeriodic {
    Rational horizon;
};

/// Release times per task, in priority order. Each list must be sorted with
/// consecutive releases at least T_i apart.
struct ExplicitReleases {
    std::vector<std::vector<Rational>> releases;
    Rational horizon;
};

/// Random sporadic releases: each gap is T_i plus a random multiple of T_i/8
/// in [0, T_i]. One-shot tasks release once at a random multiple of horizon/16
/// in [0, horizon/2].
struct RandomSporadic {
    std::uint64_t seed = 0;
    Rational horizon;
};

using ArrivalPattern = std::variant<SynchronousPeriodic, ExplicitReleases, RandomSporadic>;

/// Release lists produced by a pattern.
std::vector<std::vector<Rational>> release_times(const TaskSystem& sys, const ArrivalPattern& pattern);
const Rational& pattern_horizon(const ArrivalPattern& pattern);

enum class EventKind { Release, Start, Preempt, Finish, Miss };
std::string_view to_string(EventKind kind);

struct SimEvent {
    Rational time;
    EventKind kind;
    int task;      ///< task id
    long job;      ///< 0-based job index within the task
    int processor; ///< -1 when not applicable
};

enum class SimOutcome { MissFound, NoMissWithinHorizon };
std::string_view to_string(SimOutcome outcome);

struct SimTrace {
    std::vector<SimEvent> events;
    SimOutcome outcome = SimOutcome::NoMissWithinHorizon;
    Rational horizon;
    Rational speed;
    int processors = 0;
};

struct SimOptions {
    bool stop_on_first_miss = false;
    /// Bound on the integer time scale after rescaling.
    std::int64_t max_scaled_time = std::int64_t{1} << 60;
};

/// Global fixed-priority preemptive simulation on M unit-speed processors
/// running at `speed`. Jobs of one task run in release order, one at a time.
/// Throws HorizonOverflow if the rescaled time grid does not fit in 64 bits.
SimTrace simulate(const TaskSystem& sys, const ArrivalPattern& pattern, const Rational& speed = Rational(1),
                  const SimOptions& options = {});

/// Execution received by job `job` of task `task_id` up to the trace horizon.
Rational executed_time(const SimTrace& trace, int task_id, long job);

/// Checks the structural invariants of a trace: at most M jobs and one job
/// per task running, no processor double-booked, executed time bounded by
/// C/speed with FINISH exactly at C/speed, and no ready task waiting while a
/// processor idles or a lower-priority task runs. Returns the violations.
std::vector<std::string> validate_trace(const SimTrace& trace, const TaskSystem& sys);

/// CSV with columns time,kind,task,job,proc.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

} // namespace gfp
