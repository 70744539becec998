#include "gfp/simulator.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include "gfp/error.hpp"

namespace gfp {

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::Release: return "RELEASE";
    case EventKind::Start: return "START";
    case EventKind::Preempt: return "PREEMPT";
    case EventKind::Finish: return "FINISH";
    case EventKind::Miss: return "MISS";
    }
    return "?";
}

std::string_view to_string(SimOutcome outcome)
{
    return outcome == SimOutcome::MissFound ? "MISS_FOUND" : "NO_MISS_WITHIN_HORIZON";
}

const Rational& pattern_horizon(const ArrivalPattern& pattern)
{
    return std::visit([](const auto& p) -> const Rational& { return p.horizon; }, pattern);
}

namespace {

std::vector<std::vector<Rational>> synchronous_releases(const TaskSystem& sys, const Rational& horizon)
{
    std::vector<std::vector<Rational>> out(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto& t = sys.task(i);
        if (!t.has_finite_period()) {
            if (horizon.sign() > 0)
                out[i].push_back(Rational{});
            continue;
        }
        for (Rational r; r < horizon; r += t.period().value())
            out[i].push_back(r);
    }
    return out;
}

std::vector<std::vector<Rational>> random_releases(const TaskSystem& sys, const RandomSporadic& p)
{
    std::mt19937_64 rng(p.seed);
    std::uniform_int_distribution<int> eighth(0, 8);
    std::uniform_int_distribution<int> sixteenth(0, 8);
    std::vector<std::vector<Rational>> out(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto& t = sys.task(i);
        if (!t.has_finite_period()) {
            Rational r = p.horizon * Rational(sixteenth(rng), 16);
            if (r < p.horizon)
                out[i].push_back(std::move(r));
            continue;
        }
        const Rational& period = t.period().value();
        for (Rational r = period * Rational(eighth(rng) % 8, 8); r < p.horizon;
             r += period + period * Rational(eighth(rng), 8))
            out[i].push_back(r);
    }
    return out;
}

void check_explicit(const TaskSystem& sys, const ExplicitReleases& p)
{
    if (p.releases.size() != sys.size())
        throw Error(ErrorCode::InvalidArgument, "explicit pattern needs one release list per task");
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto& t = sys.task(i);
        const auto& list = p.releases[i];
        for (std::size_t j = 0; j < list.size(); ++j) {
            if (list[j].sign() < 0)
                throw Error(ErrorCode::InvalidArgument, "negative release time for task " + std::to_string(t.id()));
            if (j == 0)
                continue;
            const bool too_close =
                t.has_finite_period() ? list[j] - list[j - 1] < t.period().value() : true;
            if (too_close)
                throw Error(ErrorCode::InvalidArgument,
                            "releases of task " + std::to_string(t.id()) + " violate the minimum separation");
        }
    }
}

} // namespace

std::vector<std::vector<Rational>> release_times(const TaskSystem& sys, const ArrivalPattern& pattern)
{
    if (pattern_horizon(pattern).sign() < 0)
        throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0");
    if (const auto* s = std::get_if<SynchronousPeriodic>(&pattern))
        return synchronous_releases(sys, s->horizon);
    if (const auto* r = std::get_if<RandomSporadic>(&pattern))
        return random_releases(sys, *r);
    const auto& e = std::get<ExplicitReleases>(pattern);
    check_explicit(sys, e);
    return e.releases;
}

namespace {

class Scale {
public:
    explicit Scale(std::int64_t limit) : limit_(limit) {}

    void include(const Rational& r) { mpz_lcm(grain_.get_mpz_t(), grain_.get_mpz_t(), r.denominator().get_mpz_t()); }

    std::int64_t to_ticks(const Rational& r) const
    {
        const mpz_class scaled = r.numerator() * (grain_ / r.denominator());
        std::int64_t out = 0;
        if (!to_int64(scaled, out) || out > limit_)
            throw Error(ErrorCode::HorizonOverflow, "time " + r.str() + " does not fit the integer time grid (grain 1/" +
                                                        grain_.get_str() + ")");
        return out;
    }

    Rational to_time(std::int64_t ticks) const { return Rational(mpz_class(std::to_string(ticks)), grain_); }

private:
    mpz_class grain_ = 1;
    std::int64_t limit_;
};

struct Job {
    long index;
    std::int64_t deadline;
    std::int64_t remaining;
    bool missed = false;
};

struct TaskState {
    std::deque<Job> active;
    std::vector<std::int64_t> releases;
    std::size_t next_release = 0;
    long released = 0;
    int processor = -1; // processor running the head job
    std::int64_t wcet = 0;
    std::int64_t deadline = 0;
};

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

} // namespace

SimTrace simulate(const TaskSystem& sys, const ArrivalPattern& pattern, const Rational& speed,
                  const SimOptions& options)
{
    if (speed.sign() <= 0)
        throw Error(ErrorCode::InvalidArgument, "speed must be > 0");
    const auto releases = release_times(sys, pattern);
    const Rational& horizon_r = pattern_horizon(pattern);
    const int m = sys.processors();
    const std::size_t n = sys.size();

    Scale scale(options.max_scaled_time);
    scale.include(horizon_r);
    for (std::size_t i = 0; i < n; ++i) {
        scale.include(sys.task(i).wcet() / speed);
        scale.include(sys.task(i).deadline());
        for (const auto& r : releases[i])
            scale.include(r);
    }
    const std::int64_t horizon = scale.to_ticks(horizon_r);
    std::vector<TaskState> tasks(n);
    for (std::size_t i = 0; i < n; ++i) {
        tasks[i].wcet = scale.to_ticks(sys.task(i).wcet() / speed);
        tasks[i].deadline = scale.to_ticks(sys.task(i).deadline());
        for (const auto& r : releases[i])
            if (r < horizon_r)
                tasks[i].releases.push_back(scale.to_ticks(r));
        // Deadlines of late releases must also fit the grid.
        if (!tasks[i].releases.empty() && tasks[i].releases.back() > kNever - tasks[i].deadline)
            throw Error(ErrorCode::HorizonOverflow, "absolute deadline does not fit the integer time grid");
    }

    SimTrace trace;
    trace.horizon = horizon_r;
    trace.speed = speed;
    trace.processors = m;
    std::vector<int> owner(static_cast<std::size_t>(m), -1);
    const auto emit = [&](std::int64_t t, EventKind kind, std::size_t task, long job, int proc) {
        trace.events.push_back({scale.to_time(t), kind, sys.task(task).id(), job, proc});
    };

    std::int64_t now = 0;
    bool stop = false;
    while (!stop) {
        for (std::size_t i = 0; i < n; ++i) {
            auto& ts = tasks[i];
            if (ts.processor >= 0 && ts.active.front().remaining == 0) {
                emit(now, EventKind::Finish, i, ts.active.front().index, ts.processor);
                owner[static_cast<std::size_t>(ts.processor)] = -1;
                ts.processor = -1;
                ts.active.pop_front();
            }
        }
        if (now < horizon) {
            for (std::size_t i = 0; i < n; ++i) {
                auto& ts = tasks[i];
                while (ts.next_release < ts.releases.size() && ts.releases[ts.next_release] == now) {
                    ts.active.push_back({ts.released, now + ts.deadline, ts.wcet});
                    emit(now, EventKind::Release, i, ts.released, -1);
                    ++ts.released;
                    ++ts.next_release;
                }
            }
        }
        for (std::size_t i = 0; i < n && !stop; ++i) {
            for (auto& job : tasks[i].active) {
                if (!job.missed && job.deadline <= now) {
                    job.missed = true;
                    trace.outcome = SimOutcome::MissFound;
                    emit(now, EventKind::Miss, i, job.index, -1);
                    if (options.stop_on_first_miss) {
                        stop = true;
                        break;
                    }
                }
            }
        }
        if (stop || now >= horizon)
            break;

        // The M highest-priority tasks with an active job run their oldest job.
        std::vector<bool> selected(n, false);
        int chosen = 0;
        for (std::size_t i = 0; i < n && chosen < m; ++i) {
            if (!tasks[i].active.empty()) {
                selected[i] = true;
                ++chosen;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto& ts = tasks[i];
            if (ts.processor >= 0 && !selected[i]) {
                emit(now, EventKind::Preempt, i, ts.active.front().index, ts.processor);
                owner[static_cast<std::size_t>(ts.processor)] = -1;
                ts.processor = -1;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto& ts = tasks[i];
            if (selected[i] && ts.processor < 0) {
                const auto free = std::find(owner.begin(), owner.end(), -1);
                ts.processor = static_cast<int>(free - owner.begin());
                *free = static_cast<int>(i);
                emit(now, EventKind::Start, i, ts.active.front().index, ts.processor);
            }
        }

        std::int64_t next = horizon;
        for (const auto& ts : tasks) {
            if (ts.next_release < ts.releases.size())
                next = std::min(next, ts.releases[ts.next_release]);
            if (ts.processor >= 0)
                next = std::min(next, now + ts.active.front().remaining);
            for (const auto& job : ts.active)
                if (!job.missed)
                    next = std::min(next, job.deadline);
        }
        const std::int64_t dt = next - now;
        for (auto& ts : tasks)
            if (ts.processor >= 0)
                ts.active.front().remaining -= dt;
        now = next;
    }
    return trace;
}

Rational executed_time(const SimTrace& trace, int task_id, long job)
{
    Rational total;
    std::optional<Rational> started;
    for (const auto& e : trace.events) {
        if (e.task != task_id || e.job != job)
            continue;
        if (e.kind == EventKind::Start) {
            started = e.time;
        } else if ((e.kind == EventKind::Preempt || e.kind == EventKind::Finish) && started) {
            total += e.time - *started;
            started.reset();
        }
    }
    if (started)
        total += trace.horizon - *started;
    return total;
}

std::vector<std::string> validate_trace(const SimTrace& trace, const TaskSystem& sys)
{
    std::vector<std::string> problems;
    std::map<int, std::size_t> index_of;
    for (std::size_t i = 0; i < sys.size(); ++i)
        index_of[sys.task(i).id()] = i;

    const std::size_t n = sys.size();
    struct Running {
        long job = -1;
        int processor = -1;
        Rational since;
    };
    std::vector<std::optional<Running>> running(n);
    std::vector<long> released(n, 0), finished(n, 0);
    std::vector<int> owner(static_cast<std::size_t>(trace.processors), -1);
    std::map<std::pair<std::size_t, long>, Rational> executed;
    int busy = 0;

    const auto fail = [&](const SimEvent& e, const std::string& what) {
        problems.push_back("t=" + e.time.str() + " task " + std::to_string(e.task) + " job " +
                           std::to_string(e.job) + ": " + what);
    };
    const auto check_instant = [&](const Rational& t) {
        for (std::size_t i = 0; i < n; ++i) {
            if (released[i] == finished[i] || running[i])
                continue;
            if (busy < trace.processors)
                problems.push_back("t=" + t.str() + " task " + std::to_string(sys.task(i).id()) +
                                   " ready while a processor idles");
            for (std::size_t j = i + 1; j < n; ++j)
                if (running[j])
                    problems.push_back("t=" + t.str() + " task " + std::to_string(sys.task(j).id()) +
                                       " runs while higher-priority task " + std::to_string(sys.task(i).id()) +
                                       " waits");
        }
    };

    for (std::size_t pos = 0; pos < trace.events.size(); ++pos) {
        const auto& e = trace.events[pos];
        const auto it = index_of.find(e.task);
        if (it == index_of.end()) {
            fail(e, "unknown task");
            continue;
        }
        const std::size_t i = it->second;
        const Rational budget = sys.task(i).wcet() / trace.speed;
        switch (e.kind) {
        case EventKind::Release:
            if (e.job != released[i])
                fail(e, "release out of order");
            ++released[i];
            break;
        case EventKind::Start:
            if (running[i])
                fail(e, "task already running");
            if (e.job != finished[i])
                fail(e, "job started out of release order");
            if (e.job >= released[i])
                fail(e, "job started before release");
            if (e.processor < 0 || e.processor >= trace.processors) {
                fail(e, "bad processor");
                break;
            }
            if (owner[static_cast<std::size_t>(e.processor)] >= 0)
                fail(e, "processor double-booked");
            owner[static_cast<std::size_t>(e.processor)] = static_cast<int>(i);
            running[i] = Running{e.job, e.processor, e.time};
            ++busy;
            if (busy > trace.processors)
                fail(e, "more than M jobs running");
            break;
        case EventKind::Preempt:
        case EventKind::Finish: {
            if (!running[i] || running[i]->job != e.job || running[i]->processor != e.processor) {
                fail(e, "stop event for a job that is not running");
                break;
            }
            auto& done = executed[{i, e.job}];
            done += e.time - running[i]->since;
            owner[static_cast<std::size_t>(e.processor)] = -1;
            running[i].reset();
            --busy;
            if (done > budget)
                fail(e, "executed more than C/speed");
            if (e.kind == EventKind::Finish) {
                if (done != budget)
                    fail(e, "finished with " + done.str() + " of " + budget.str());
                ++finished[i];
            } else if (done == budget) {
                fail(e, "preempted after completing its budget");
            }
            break;
        }
        case EventKind::Miss: break;
        }
        const bool last_at_instant = pos + 1 == trace.events.size() || trace.events[pos + 1].time != e.time;
        if (last_at_instant && e.time < trace.horizon)
            check_instant(e.time);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (running[i] && executed[{i, running[i]->job}] + trace.horizon - running[i]->since >
                              sys.task(i).wcet() / trace.speed)
            problems.push_back("task " + std::to_string(sys.task(i).id()) + " overruns its budget by the horizon");
    return problems;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace)
{
    out << "time,kind,task,job,proc\n";
    for (const auto& e : trace.events) {
        out << e.time.exact_decimal() << ',' << to_string(e.kind) << ',' << e.task << ',' << e.job << ',';
        if (e.processor >= 0)
            out << e.processor;
        out << '\n';
    }
}

} // namespace gfp
