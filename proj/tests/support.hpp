#pragma once

#include <random>
#include <string>
#include <vector>

#include "gfp/rational.hpp"
#include "gfp/task_model.hpp"

namespace testing {

inline gfp::Rational R(const std::string& text) { return gfp::Rational::parse(text); }

inline gfp::SporadicTask task(int id, const std::string& c, const std::string& d, const std::string& t)
{
    return gfp::SporadicTask(id, R(c), R(d), t == "inf" ? gfp::Period::infinite() : gfp::Period(R(t)));
}

/// Random task with small integer-ish parameters on a 1/grain grid.
inline gfp::SporadicTask random_task(std::mt19937_64& rng, int id, long grain = 4, long max_period = 20,
                                     bool allow_infinite = false)
{
    std::uniform_int_distribution<long> period_ticks(1, max_period * grain);
    const gfp::Rational g(grain);
    if (allow_infinite && std::uniform_int_distribution<int>(0, 9)(rng) == 0) {
        const gfp::Rational c = gfp::Rational(period_ticks(rng)) / g;
        const gfp::Rational d = c * gfp::Rational(std::uniform_int_distribution<long>(1, 4)(rng));
        return gfp::SporadicTask(id, c, d, gfp::Period::infinite());
    }
    const long t_ticks = period_ticks(rng);
    const long c_ticks = std::uniform_int_distribution<long>(1, t_ticks)(rng);
    const long d_ticks = std::uniform_int_distribution<long>(c_ticks, 3 * t_ticks)(rng);
    return gfp::SporadicTask(id, gfp::Rational(c_ticks) / g, gfp::Rational(d_ticks) / g,
                             gfp::Period(gfp::Rational(t_ticks) / g));
}

/// Periods drawn from a divisor-friendly set so hyperperiods stay small.
inline std::vector<gfp::Rational> small_lcm_periods()
{
    std::vector<gfp::Rational> out;
    for (int p : {2, 4, 5, 8, 10, 20, 25, 40, 50, 100})
        out.emplace_back(p);
    return out;
}

} // namespace testing
