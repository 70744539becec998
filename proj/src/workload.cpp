#include "gfp/workload.hpp"

#include <algorithm>
#include <ostream>
#include <queue>

#include "gfp/error.hpp"

namespace gfp {

const Rational& ExtendedTime::value() const
{
    if (neg_inf_)
        throw Error(ErrorCode::InvalidArgument, "value() on -inf");
    return value_;
}

Rational dbf(const SporadicTask& task, const Rational& t)
{
    if (t.sign() < 0)
        throw Error(ErrorCode::InvalidArgument, "dbf requires t >= 0");
    if (t < task.deadline())
        return {};
    if (!task.has_finite_period())
        return task.wcet();
    const mpz_class jobs = floor_div(t - task.deadline(), task.period().value()) + 1;
    return Rational(jobs) * task.wcet();
}

Rational work_value(const SporadicTask& task, const Rational& t)
{
    if (t.sign() < 0)
        throw Error(ErrorCode::InvalidArgument, "work_value requires t >= 0");
    if (!task.has_finite_period())
        return min(task.wcet(), t);
    const Rational& period = task.period().value();
    const Rational full(floor_div(t, period));
    return full * task.wcet() + min(task.wcet(), t - full * period);
}

ExtendedTime work(const SporadicTask& task, const Rational& t)
{
    if (t.sign() < 0)
        return ExtendedTime::neg_infinity();
    return work_value(task, t);
}

Rational omega_heavy(const SporadicTask& task, const Rational& delta)
{
    if (delta.sign() < 0)
        throw Error(ErrorCode::InvalidArgument, "omega_heavy requires delta >= 0");
    return work_value(task, delta + task.deadline());
}

namespace {

// (p2+1) C + max(0, C - rho (T - q2)) for delta >= C and finite T.
Rational pushed_light(const SporadicTask& task, const Rational& delta, const Rational& rho)
{
    const Rational& c = task.wcet();
    const Rational& period = task.period().value();
    const Rational p2 = Rational(ceil_div(delta - c, period)) - 1;
    const Rational q2 = delta - c - p2 * period;
    return (p2 + 1) * c + max(Rational{}, c - rho * (period - q2));
}

void check_light_rho(const SporadicTask& task, const Rational& rho)
{
    if (rho < task.utilization() || rho > Rational(1))
        throw Error(ErrorCode::InvalidArgument,
                    "omega_light needs U <= rho <= 1 (U=" + task.utilization().str() + ", rho=" + rho.str() + ")");
}

} // namespace

Rational omega_light(const SporadicTask& task, const Rational& delta, const Rational& rho)
{
    check_light_rho(task, rho);
    if (delta.sign() <= 0)
        return {};
    const Rational& c = task.wcet();
    if (!task.has_finite_period())
        return min(c, delta);
    if (delta <= c)
        return delta;
    return min(max(work_value(task, delta), pushed_light(task, delta, rho)), omega_heavy(task, delta));
}

std::vector<Rational> light_heavy_crossings(const SporadicTask& task, const Rational& rho)
{
    check_light_rho(task, rho);
    std::vector<Rational> out;
    if (!task.has_finite_period())
        return out;
    const Rational& c = task.wcet();
    const Rational& period = task.period().value();
    const Rational lo = c, hi = c + period;
    std::vector<Rational> xs{lo, hi};
    if (const Rational ramp = hi - c / rho; ramp > lo)
        xs.push_back(ramp);
    for (const Rational& offset : {-task.deadline(), c - task.deadline()}) {
        for (Rational x = offset + Rational(ceil_div(lo - offset, period)) * period; x <= hi; x += period)
            xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const auto gap = [&](const Rational& x) { return pushed_light(task, x, rho) - omega_heavy(task, x); };
    Rational prev = gap(xs.front());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const Rational cur = gap(xs[i]);
        if ((prev.sign() < 0 && cur.sign() > 0) || (prev.sign() > 0 && cur.sign() < 0))
            out.push_back(xs[i - 1] + (xs[i] - xs[i - 1]) * prev / (prev - cur));
        prev = cur;
    }
    return out;
}

Rational omega_diff(const SporadicTask& task, const Rational& delta, const Rational& rho)
{
    if (task.utilization() > rho)
        return omega_heavy(task, delta) - work_value(task, delta);
    return omega_light(task, delta, rho) - work_value(task, delta);
}

Rational linear_work_bound(const SporadicTask& task, const Rational& delta)
{
    const Rational& u = task.utilization();
    return task.wcet() - task.wcet() * u + u * delta;
}

Rational linear_heavy_bound(const SporadicTask& task, const Rational& delta)
{
    const Rational& u = task.utilization();
    return task.wcet() + u * task.deadline() - task.wcet() * u + u * delta;
}

// ---------------------------------------------------------------------------

PiecewiseLinearCurve::PiecewiseLinearCurve(std::vector<Breakpoint> points) : points_(std::move(points))
{
    if (points_.empty())
        throw Error(ErrorCode::InvalidArgument, "curve needs at least one breakpoint");
}

Rational PiecewiseLinearCurve::value_at(const Rational& delta) const
{
    if (delta < points_.front().delta || delta > points_.back().delta)
        throw Error(ErrorCode::InvalidArgument, "delta " + delta.str() + " outside materialized range");
    auto it = std::upper_bound(points_.begin(), points_.end(), delta,
                               [](const Rational& d, const Breakpoint& b) { return d < b.delta; });
    const Breakpoint& seg = *std::prev(it);
    return seg.value + seg.right_slope * (delta - seg.delta);
}

namespace {

// Appends offset + m*period for every integer m with the point in [lo, hi]
// and offset + m*period >= floor.
void append_progression(std::vector<Rational>& out, const Rational& offset, const Rational& period,
                        const Rational& lo, const Rational& hi, const Rational& floor_at)
{
    const Rational start = max(lo, floor_at);
    if (start > hi)
        return;
    Rational point = offset + Rational(ceil_div(start - offset, period)) * period;
    for (; point <= hi; point += period)
        out.push_back(point);
}

void append_if_within(std::vector<Rational>& out, const Rational& point, const Rational& lo, const Rational& hi)
{
    if (point >= lo && point <= hi)
        out.push_back(point);
}

Rational curve_value(const SporadicTask& task, CurveKind kind, const Rational& delta, const Rational& rho)
{
    switch (kind) {
    case CurveKind::Work: return work_value(task, delta);
    case CurveKind::OmegaHeavy: return omega_heavy(task, delta);
    case CurveKind::OmegaLight: return omega_light(task, delta, rho);
    }
    return {};
}

} // namespace

std::vector<Rational> curve_breakpoints(const SporadicTask& task, CurveKind kind, const Rational& lo,
                                        const Rational& hi, const Rational& rho)
{
    std::vector<Rational> out{lo, hi};
    const Rational& c = task.wcet();
    const Rational unbounded_below = lo - 1;
    if (!task.has_finite_period()) {
        switch (kind) {
        case CurveKind::Work:
        case CurveKind::OmegaLight: append_if_within(out, c, lo, hi); break;
        case CurveKind::OmegaHeavy: append_if_within(out, c - task.deadline(), lo, hi); break;
        }
    } else {
        const Rational& period = task.period().value();
        switch (kind) {
        case CurveKind::Work:
            append_progression(out, Rational{}, period, lo, hi, unbounded_below);
            append_progression(out, c, period, lo, hi, unbounded_below);
            break;
        case CurveKind::OmegaHeavy:
            append_progression(out, -task.deadline(), period, lo, hi, unbounded_below);
            append_progression(out, c - task.deadline(), period, lo, hi, unbounded_below);
            break;
        case CurveKind::OmegaLight:
            append_if_within(out, Rational{}, lo, hi);
            append_progression(out, c, period, lo, hi, c);
            // Start of the rho-sloped ramp inside each period after the offset C.
            append_progression(out, c + period - c / rho, period, lo, hi, c);
            for (const auto& x : light_heavy_crossings(task, rho))
                append_progression(out, x, period, lo, hi, c);
            break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PiecewiseLinearCurve materialize(const SporadicTask& task, CurveKind kind, const Rational& lo, const Rational& hi,
                                 const Rational& rho)
{
    if (lo.sign() < 0 || hi < lo)
        throw Error(ErrorCode::InvalidArgument, "materialize needs 0 <= lo <= hi");
    // Look one period (or one job) past hi so the last segment has a slope.
    const Rational extension = task.has_finite_period() ? task.period().value() : task.wcet() + task.deadline();
    auto deltas = curve_breakpoints(task, kind, lo, hi + extension, rho);
    if (const auto at = std::lower_bound(deltas.begin(), deltas.end(), hi); *at != hi)
        deltas.insert(at, hi);
    std::vector<Breakpoint> points;
    for (std::size_t i = 0; i < deltas.size() && deltas[i] <= hi; ++i) {
        Breakpoint b{deltas[i], curve_value(task, kind, deltas[i], rho), Rational{}};
        if (i + 1 < deltas.size())
            b.right_slope = (curve_value(task, kind, deltas[i + 1], rho) - b.value) / (deltas[i + 1] - deltas[i]);
        points.push_back(std::move(b));
    }
    return PiecewiseLinearCurve(std::move(points));
}

// ---------------------------------------------------------------------------

namespace {

struct StepStream {
    Rational next;
    std::size_t task;
};

struct LaterFirst {
    bool operator()(const StepStream& a, const StepStream& b) const { return a.next > b.next; }
};

// Visits the dbf step points of tasks 0..index in increasing order. The
// visitor receives (t, sum dbf(t)) and returns false to stop. `stop_before`
// is consulted before each point.
template <typename StopBefore, typename Visit>
std::uint64_t scan_dbf_steps(const TaskSystem& sys, std::size_t index, const LoadOptions& options,
                             StopBefore stop_before, Visit visit)
{
    std::priority_queue<StepStream, std::vector<StepStream>, LaterFirst> heap;
    for (std::size_t i = 0; i <= index; ++i)
        heap.push({sys.task(i).deadline(), i});

    Rational demand;
    std::uint64_t visited = 0;
    while (!heap.empty()) {
        const Rational t = heap.top().next;
        if (stop_before(t))
            break;
        while (!heap.empty() && heap.top().next == t) {
            StepStream s = heap.top();
            heap.pop();
            const auto& task = sys.task(s.task);
            demand += task.wcet();
            if (task.has_finite_period()) {
                s.next += task.period().value();
                heap.push(std::move(s));
            }
        }
        if (++visited > options.max_points)
            throw Error(ErrorCode::HyperperiodOverflow,
                        "load scan exceeded " + std::to_string(options.max_points) + " step points");
        if (!visit(t, demand))
            break;
    }
    return visited;
}

struct LoadBounds {
    Rational sum_u;
    Rational slack; // B
    Rational max_deadline;
};

LoadBounds load_bounds(const TaskSystem& sys, std::size_t index)
{
    LoadBounds b;
    for (std::size_t i = 0; i <= index; ++i) {
        const auto& t = sys.task(i);
        b.sum_u += t.utilization();
        b.max_deadline = max(b.max_deadline, t.deadline());
        if (t.has_finite_period()) {
            if (t.period().value() > t.deadline())
                b.slack += t.utilization() * (t.period().value() - t.deadline());
        } else {
            b.slack += t.wcet();
        }
    }
    return b;
}

Rational hyperperiod_horizon(const TaskSystem& sys, std::size_t index, const LoadBounds& b,
                             const LoadOptions& options)
{
    const auto prefix = sys.tasks().first(index + 1);
    const auto hp = finite_hyperperiod(prefix, time_grain(prefix), options.grain_limit);
    if (!hp)
        throw Error(ErrorCode::HyperperiodOverflow, "hyperperiod of the first " + std::to_string(index + 1) +
                                                        " tasks exceeds " + std::to_string(options.grain_limit) +
                                                        " grains");
    return b.max_deadline + *hp;
}

void check_index(const TaskSystem& sys, std::size_t index)
{
    if (index >= sys.size())
        throw Error(ErrorCode::IndexOutOfRange, "task index " + std::to_string(index) + " out of range");
}

} // namespace

LoadResult load(const TaskSystem& sys, std::size_t index, const LoadOptions& options)
{
    check_index(sys, index);
    const LoadBounds b = load_bounds(sys, index);
    LoadResult result{b.sum_u, std::nullopt, 0};
    if (b.slack.is_zero())
        return result; // every ratio is <= sum U

    std::optional<Rational> horizon;
    const auto stop_before = [&](const Rational& t) {
        if (result.value > b.sum_u)
            return t * (result.value - b.sum_u) >= b.slack;
        if (!horizon)
            horizon = hyperperiod_horizon(sys, index, b, options);
        return t > *horizon;
    };
    const auto visit = [&](const Rational& t, const Rational& demand) {
        Rational ratio = demand / t;
        if (ratio > result.value) {
            result.value = std::move(ratio);
            result.attained_at = t;
        }
        return true;
    };
    result.points_visited = scan_dbf_steps(sys, index, options, stop_before, visit);
    return result;
}

bool load_exceeds(const TaskSystem& sys, std::size_t index, const Rational& threshold, const LoadOptions& options)
{
    check_index(sys, index);
    const LoadBounds b = load_bounds(sys, index);
    if (b.sum_u > threshold)
        return true;
    if (b.slack.is_zero())
        return false;

    std::optional<Rational> horizon;
    if (threshold == b.sum_u)
        horizon = hyperperiod_horizon(sys, index, b, options);
    const Rational margin = threshold - b.sum_u;
    bool exceeded = false;
    const auto stop_before = [&](const Rational& t) {
        return horizon ? t > *horizon : t * margin >= b.slack;
    };
    const auto visit = [&](const Rational& t, const Rational& demand) {
        exceeded = demand > threshold * t;
        return !exceeded;
    };
    scan_dbf_steps(sys, index, options, stop_before, visit);
    return exceeded;
}

// ---------------------------------------------------------------------------

std::vector<CurveRow> workload_curves(const SporadicTask& task, const Rational& rho,
                                      std::span<const Rational> deltas)
{
    std::vector<CurveRow> rows;
    rows.reserve(deltas.size());
    for (const auto& d : deltas)
        rows.push_back({d, work_value(task, d), omega_light(task, d, rho), omega_heavy(task, d),
                        linear_work_bound(task, d), linear_heavy_bound(task, d)});
    return rows;
}

void write_curves_csv(std::ostream& out, std::span<const CurveRow> rows)
{
    out << "delta,work,omega_light,omega_heavy,linear_work,linear_heavy\n";
    for (const auto& r : rows)
        out << r.delta.exact_decimal() << ',' << r.work.exact_decimal() << ',' << r.omega_light.exact_decimal()
            << ',' << r.omega_heavy.exact_decimal() << ',' << r.linear_work.exact_decimal() << ','
            << r.linear_heavy.exact_decimal() << '\n';
}

} // namespace gfp
