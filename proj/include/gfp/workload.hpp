#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gfp/rational.hpp"
#include "gfp/task_model.hpp"

namespace gfp {

/// A time value extended with a symbolic negative infinity. work_i(t) is
/// defined to be -inf for t < 0.
class ExtendedTime {
public:
    ExtendedTime(Rational v) : value_(std::move(v)) {}
    static ExtendedTime neg_infinity()
    {
        ExtendedTime e{Rational{}};
        e.neg_inf_ = true;
        return e;
    }

    bool is_neg_infinity() const { return neg_inf_; }
    /// Throws when called on -inf.
    const Rational& value() const;

    friend bool operator==(const ExtendedTime& a, const ExtendedTime& b)
    {
        return a.neg_inf_ == b.neg_inf_ && (a.neg_inf_ || a.value_ == b.value_);
    }

private:
    Rational value_;
    bool neg_inf_ = false;
};

/// Demand bound function: max{0, (floor((t - D)/T) + 1) C}. An infinite
/// period contributes C once t >= D. Requires t >= 0.
Rational dbf(const SporadicTask& task, const Rational& t);

/// Maximum sequential execution of jobs released in a window of length t:
/// floor(t/T) C + min{C, t - floor(t/T) T}; -inf for t < 0; min{C, t} for an
/// infinite period.
ExtendedTime work(const SporadicTask& task, const Rational& t);

/// work() restricted to t >= 0 (throws InvalidArgument otherwise).
Rational work_value(const SporadicTask& task, const Rational& t);

/// Carry-in bound for a task whose jobs all meet their deadlines:
/// work(delta + D).
Rational omega_heavy(const SporadicTask& task, const Rational& delta);

/// Carry-in bound for a light task (U <= rho <= 1): delta up to C, then
/// max(work, (p2+1) C + max(0, C - rho (T - q2))) capped by omega_heavy.
/// Throws InvalidArgument if rho is outside [U, 1]. Returns 0 for delta <= 0.
Rational omega_light(const SporadicTask& task, const Rational& delta, const Rational& rho);

/// Points in (C, C+T] where the uncapped light bound crosses omega_heavy.
/// The crossings repeat with period T; empty for one-shot tasks.
std::vector<Rational> light_heavy_crossings(const SporadicTask& task, const Rational& rho);

/// omega_heavy - work when U > rho, omega_light - work otherwise.
Rational omega_diff(const SporadicTask& task, const Rational& delta, const Rational& rho);

/// C - C U + U delta, a linear upper bound on work and on omega_light.
Rational linear_work_bound(const SporadicTask& task, const Rational& delta);

/// C + U D - C U + U delta, a linear upper bound on omega_heavy.
Rational linear_heavy_bound(const SporadicTask& task, const Rational& delta);

// ---------------------------------------------------------------------------
// Piecewise-linear materialization

struct Breakpoint {
    Rational delta;
    Rational value;
    Rational right_slope;
};

/// Non-decreasing piecewise-linear function on [first, last] breakpoint.
class PiecewiseLinearCurve {
public:
    explicit PiecewiseLinearCurve(std::vector<Breakpoint> points);

    std::span<const Breakpoint> breakpoints() const { return points_; }
    /// Linear interpolation; throws outside the materialized range.
    Rational value_at(const Rational& delta) const;

private:
    std::vector<Breakpoint> points_;
};

enum class CurveKind { Work, OmegaHeavy, OmegaLight };

/// Every delta in [lo, hi] where the chosen curve changes slope, plus lo and
/// hi, sorted and unique. `rho` is only read for OmegaLight.
std::vector<Rational> curve_breakpoints(const SporadicTask& task, CurveKind kind, const Rational& lo,
                                        const Rational& hi, const Rational& rho = Rational(1));

/// Materializes the chosen curve on [lo, hi] (lo >= 0).
PiecewiseLinearCurve materialize(const SporadicTask& task, CurveKind kind, const Rational& lo, const Rational& hi,
                                 const Rational& rho = Rational(1));

// ---------------------------------------------------------------------------
// load(k)

struct LoadOptions {
    /// Bound on the hyperperiod fallback, in time grains.
    std::uint64_t grain_limit = default_hyperperiod_grain_limit;
    /// Bound on the number of dbf step points visited.
    std::uint64_t max_points = 50'000'000;
};

struct LoadResult {
    Rational value;
    /// Step point attaining the maximum; nullopt when the value is the
    /// t -> infinity limit sum U_i.
    std::optional<Rational> attained_at;
    std::uint64_t points_visited = 0;
};

/// max_{t>0} sum_{i<=index} dbf(tau_i, t) / t, exactly.
///
/// Candidate points are the dbf steps D_i + m T_i. The scan stops once
///   sum dbf(t)/t <= sum U + B/t,  B = sum_i U_i max{0, T_i - D_i} (+ C_i for T_i = inf)
/// can no longer beat the best value; if the best value equals sum U the
/// hyperperiod bound max D + HP is used instead. Throws HyperperiodOverflow
/// when neither bound is usable.
LoadResult load(const TaskSystem& sys, std::size_t index, const LoadOptions& options = {});

/// Decides load(index) > threshold without computing the maximum.
bool load_exceeds(const TaskSystem& sys, std::size_t index, const Rational& threshold,
                  const LoadOptions& options = {});

// ---------------------------------------------------------------------------
// Curve dump (CSV for plotting)

struct CurveRow {
    Rational delta;
    Rational work;
    Rational omega_light;
    Rational omega_heavy;
    Rational linear_work;
    Rational linear_heavy;
};

/// Evaluates every curve at each delta (delta >= 0). rho must be in [U, 1].
std::vector<CurveRow> workload_curves(const SporadicTask& task, const Rational& rho,
                                      std::span<const Rational> deltas);

void write_curves_csv(std::ostream& out, std::span<const CurveRow> rows);

} // namespace gfp
