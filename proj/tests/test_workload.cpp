#include <numeric>
#include <sstream>

#include "doctest.h"
#include "gfp/error.hpp"
#include "gfp/workload.hpp"
#include "support.hpp"

using namespace gfp;
using testing::R;
using testing::task;

namespace {

// Jobs released at 0, T, 2T, ... executed back to back: execution completed by t.
Rational oracle_work(const SporadicTask& t, const Rational& at)
{
    Rational total;
    const Rational step = t.has_finite_period() ? t.period().value() : at + 1;
    for (Rational release; release < at; release += step) {
        Rational slice = at - release;
        if (slice > t.wcet())
            slice = t.wcet();
        total += slice;
        if (!t.has_finite_period())
            break;
    }
    return total;
}

// Jobs with release + D <= t.
Rational oracle_dbf(const SporadicTask& t, const Rational& at)
{
    Rational total;
    const Rational step = t.has_finite_period() ? t.period().value() : at + 1;
    for (Rational release; release + t.deadline() <= at; release += step) {
        total += t.wcet();
        if (!t.has_finite_period())
            break;
    }
    return total;
}

// Scans every dbf step point up to max D + lcm of periods.
Rational oracle_load(const TaskSystem& sys, std::size_t k)
{
    Rational hp(1), max_d, sum_u;
    for (std::size_t i = 0; i <= k; ++i) {
        const auto& t = sys.task(i);
        max_d = max(max_d, t.deadline());
        sum_u += t.utilization();
        if (t.has_finite_period())
            hp = lcm(hp, t.period().value());
    }
    Rational best = sum_u;
    for (std::size_t j = 0; j <= k; ++j) {
        const auto& tj = sys.task(j);
        const Rational step = tj.has_finite_period() ? tj.period().value() : max_d + hp + 1;
        for (Rational at = tj.deadline(); at <= max_d + hp; at += step) {
            Rational demand;
            for (std::size_t i = 0; i <= k; ++i)
                demand += oracle_dbf(sys.task(i), at);
            best = max(best, demand / at);
        }
    }
    return best;
}

// Light carry-in bound evaluated from its case definition, capped by the
// heavy bound work(delta + D).
Rational oracle_light(const SporadicTask& t, const Rational& delta, const Rational& rho)
{
    if (delta.sign() <= 0)
        return {};
    if (!t.has_finite_period())
        return min(t.wcet(), delta);
    if (delta <= t.wcet())
        return delta;
    const Rational& c = t.wcet();
    const Rational& period = t.period().value();
    const Rational p2(mpz_class(((delta - c) / period).ceil() - 1));
    const Rational q2 = delta - c - p2 * period;
    const Rational pushed = (p2 + 1) * c + max(Rational(0), c - rho * (period - q2));
    return min(max(oracle_work(t, delta), pushed), oracle_work(t, delta + t.deadline()));
}

// Periods with a small common multiple keep the brute force cheap.
SporadicTask small_lcm_task(std::mt19937_64& rng, int id)
{
    const int periods[] = {1, 2, 3, 4, 6, 12};
    if (std::uniform_int_distribution<int>(0, 7)(rng) == 0)
        return SporadicTask(id, Rational(std::uniform_int_distribution<long>(1, 6)(rng), 2),
                            Rational(std::uniform_int_distribution<long>(6, 20)(rng), 2), Period::infinite());
    const long t = 2 * periods[std::uniform_int_distribution<int>(0, 5)(rng)];
    const long c = std::uniform_int_distribution<long>(1, t)(rng);
    const long d = std::uniform_int_distribution<long>(c, 3 * t)(rng);
    return SporadicTask(id, Rational(c, 2), Rational(d, 2), Period(Rational(t, 2)));
}

} // namespace

TEST_CASE("anchored values for (C=3, D=45, T=10)")
{
    const auto t = task(0, "3", "45", "10");
    CHECK(dbf(t, R("44")) == Rational(0));
    CHECK(dbf(t, R("45")) == Rational(3));
    CHECK(dbf(t, R("55")) == Rational(6));
    CHECK(work(t, R("13")) == ExtendedTime(Rational(6)));
    CHECK(work(t, R("7")) == ExtendedTime(Rational(3)));
    CHECK(work(t, R("-1")).is_neg_infinity());
    CHECK(omega_heavy(t, R("5")) == Rational(15));
    CHECK(omega_heavy(t, R("0")) == Rational(15));
    CHECK(omega_light(t, R("13"), R("0.5")) == Rational(6));
    CHECK(omega_light(t, R("7"), R("0.3")) == R("4.2"));
    CHECK(omega_light(t, R("2"), R("0.4")) == Rational(2));
    CHECK(omega_diff(t, R("5"), R("0.2")) == Rational(12));
    CHECK(omega_diff(t, R("2"), R("0.5")) == Rational(0));
    CHECK(linear_work_bound(t, R("0")) == R("2.1"));
    CHECK(linear_work_bound(t, R("60")) == R("20.1"));
    CHECK(linear_work_bound(t, R("13")) == R("6"));
    CHECK(linear_heavy_bound(t, R("5")) == R("17.1"));
    CHECK(linear_heavy_bound(t, R("0")) == linear_work_bound(t, t.deadline()));
    CHECK_THROWS_AS(omega_light(t, R("5"), R("0.2")), Error);
    CHECK_THROWS_AS(omega_light(t, R("5"), R("1.1")), Error);
}

TEST_CASE("light bound is capped by the heavy bound")
{
    const auto t = task(0, "1/4", "3/4", "11/2");
    const Rational rho(1, 22);
    CHECK(omega_light(t, R("13/2"), rho) == Rational(1, 2));
    CHECK(omega_heavy(t, R("13/2")) == Rational(1, 2));
    const auto crossings = light_heavy_crossings(t, rho);
    CHECK_FALSE(crossings.empty());
    for (const auto& x : crossings) {
        CHECK(x > t.wcet());
        CHECK(x <= t.wcet() + t.period().value());
    }
    CHECK(light_heavy_crossings(task(0, "3", "45", "10"), R("0.5")).empty());
}

TEST_CASE("one-shot task conventions")
{
    const auto t = task(0, "1/3", "1", "inf");
    CHECK(work_value(t, R("0.2")) == R("0.2"));
    CHECK(work_value(t, R("5")) == Rational(1, 3));
    CHECK(dbf(t, R("0.99")) == Rational(0));
    CHECK(dbf(t, R("1")) == Rational(1, 3));
    CHECK(omega_light(t, R("3"), R("0.1")) == work_value(t, R("3")));
    CHECK(omega_heavy(t, R("0")) == Rational(1, 3));
}

TEST_CASE("curve functions agree with simulation oracles")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto t = testing::random_task(rng, 0, 4, 12, true);
        std::uniform_int_distribution<long> ticks(0, 400);
        for (int s = 0; s < 20; ++s) {
            const Rational at = Rational(ticks(rng), 8);
            CHECK(work_value(t, at) == oracle_work(t, at));
            CHECK(dbf(t, at) == oracle_dbf(t, at));
            CHECK(dbf(t, at) <= work_value(t, at));
        }
    }
}

TEST_CASE("workload ordering, linear bounds and carry-in soundness")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 150; ++trial) {
        const auto t = testing::random_task(rng, 0, 4, 12);
        const Rational& u = t.utilization();
        const Rational rho = u + (Rational(1) - u) * Rational(std::uniform_int_distribution<long>(0, 10)(rng), 10);
        for (int s = 0; s < 12; ++s) {
            const Rational delta = Rational(std::uniform_int_distribution<long>(1, 480)(rng), 8);
            const Rational w = work_value(t, delta), light = omega_light(t, delta, rho), heavy = omega_heavy(t, delta);
            CHECK(w <= light);
            CHECK(light <= heavy);
            CHECK(w <= linear_work_bound(t, delta));
            CHECK(light <= linear_work_bound(t, delta));
            CHECK(heavy <= linear_heavy_bound(t, delta));
            CHECK(omega_diff(t, delta, rho) >= Rational(0));
            CHECK(oracle_light(t, delta, rho) == light);
            CHECK(omega_light(t, delta, Rational(1)) <= light);
            CHECK(omega_light(t, delta + Rational(1, 8), rho) >= light);
            const Rational hp = 3 * t.period().value();
            CHECK(work_value(t, delta + hp) == w + hp * u);
        }
    }
}

TEST_CASE("materialized curves interpolate the exact functions")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        const auto t = testing::random_task(rng, 0, 2, 10);
        const Rational rho = max(t.utilization(), Rational(1, 2));
        const Rational hi = 4 * t.period().value() + t.deadline();
        for (auto kind : {CurveKind::Work, CurveKind::OmegaHeavy, CurveKind::OmegaLight}) {
            const auto curve = materialize(t, kind, Rational(0), hi, rho);
            const auto pts = curve.breakpoints();
            for (std::size_t i = 1; i < pts.size(); ++i) {
                CHECK(pts[i - 1].delta < pts[i].delta);
                CHECK(pts[i - 1].value <= pts[i].value);
            }
            for (Rational x; x <= hi; x += Rational(1, 16)) {
                Rational exact;
                switch (kind) {
                case CurveKind::Work: exact = work_value(t, x); break;
                case CurveKind::OmegaHeavy: exact = omega_heavy(t, x); break;
                case CurveKind::OmegaLight: exact = omega_light(t, x, rho); break;
                }
                CHECK(curve.value_at(x) == exact);
            }
        }
    }
}

TEST_CASE("load")
{
    SUBCASE("hand examples")
    {
        const TaskSystem a({task(0, "1", "2", "2")}, 2);
        const auto r = load(a, 0);
        CHECK(r.value == Rational(1, 2));

        const TaskSystem b({task(0, "1", "4", "2")}, 2);
        CHECK(load(b, 0).value == Rational(1, 2));
        CHECK_FALSE(load(b, 0).attained_at.has_value());

        const TaskSystem c({task(0, "1", "2", "2"), task(1, "1", "2", "2")}, 2);
        CHECK(load(c, 1).value == Rational(1));

        const TaskSystem d({task(0, "1", "2", "10")}, 2);
        const auto rd = load(d, 0);
        CHECK(rd.value == Rational(1, 2));
        REQUIRE(rd.attained_at);
        CHECK(*rd.attained_at == Rational(2));
    }
    SUBCASE("matches brute force over step points")
    {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 150; ++trial) {
            std::vector<SporadicTask> tasks;
            const int n = std::uniform_int_distribution<int>(1, 5)(rng);
            for (int i = 0; i < n; ++i)
                tasks.push_back(small_lcm_task(rng, i));
            const TaskSystem sys(tasks, 2);
            for (std::size_t k = 0; k < sys.size(); ++k) {
                const Rational expected = oracle_load(sys, k);
                CHECK(load(sys, k).value == expected);
                CHECK_FALSE(load_exceeds(sys, k, expected));
                CHECK(load_exceeds(sys, k, expected - Rational(1, 1000)));
            }
        }
    }
}

TEST_CASE("curve CSV dump")
{
    const auto t = task(0, "3", "45", "10");
    const std::vector<Rational> deltas{Rational(0), Rational(13), Rational(60)};
    const auto rows = workload_curves(t, R("0.5"), deltas);
    std::ostringstream out;
    write_curves_csv(out, rows);
    CHECK(out.str() ==
          "delta,work,omega_light,omega_heavy,linear_work,linear_heavy\n"
          "0,0,0,15,2.1,15.6\n"
          "13,6,6,18,6,19.5\n"
          "60,18,19.5,33,20.1,33.6\n");
}
