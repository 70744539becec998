#include "gfp/generator.hpp"

#include <cmath>

#include "gfp/error.hpp"

namespace gfp {

void validate(const GenConfig& c)
{
    const auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
    if (c.tasks < 1)
        bad("tasks must be >= 1");
    if (!(c.total_utilization > 0) || c.total_utilization > c.tasks)
        bad("total utilization must be in (0, N]");
    if (c.period_choices.empty() && (!(c.period_lo > 0) || c.period_hi < c.period_lo))
        bad("period range must satisfy 0 < lo <= hi");
    for (const auto& p : c.period_choices)
        if (p.sign() <= 0)
            bad("period choices must be positive");
    if (!(c.ratio_lo > 0) || c.ratio_hi < c.ratio_lo)
        bad("deadline ratio interval must satisfy 0 < lo <= hi");
    if (c.utilization_denominator < 1 || c.period_denominator < 1 || c.ratio_denominator < 1)
        bad("snap denominators must be >= 1");
    if (c.resample_limit < 1)
        bad("resample limit must be >= 1");
}

std::vector<double> uunifast_discard(int n, double total, std::mt19937_64& rng, int limit)
{
    if (n < 1 || !(total > 0))
        throw Error(ErrorCode::InvalidArgument, "uunifast needs n >= 1 and total > 0");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (int attempt = 0; attempt < limit; ++attempt) {
        double sum = total;
        for (int i = 0; i + 1 < n; ++i) {
            const double next = sum * std::pow(unit(rng), 1.0 / (n - i - 1));
            u[static_cast<std::size_t>(i)] = sum - next;
            sum = next;
        }
        u.back() = sum;
        bool ok = true;
        for (double x : u)
            ok = ok && x <= 1.0;
        if (ok)
            return u;
    }
    throw Error(ErrorCode::ResampleLimit, "uunifast discarded " + std::to_string(limit) + " vectors");
}

std::vector<double> uunifast_discard(int n, double total, std::uint64_t seed, int limit)
{
    std::mt19937_64 rng(seed);
    return uunifast_discard(n, total, rng, limit);
}

std::vector<Rational> snapped_utilizations(int n, double total, long denominator, std::mt19937_64& rng, int limit)
{
    const Rational target = Rational::snap(total, denominator);
    const Rational one(1);
    for (int attempt = 0; attempt < limit; ++attempt) {
        const auto raw = uunifast_discard(n, total, rng, limit);
        std::vector<Rational> u;
        u.reserve(raw.size());
        Rational sum;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
            u.push_back(Rational::snap(raw[i], denominator));
            sum += u.back();
            ok = ok && u.back().sign() > 0;
        }
        u.push_back(target - sum);
        ok = ok && u.back().sign() > 0 && u.back() <= one;
        if (ok)
            return u;
    }
    throw Error(ErrorCode::ResampleLimit, "could not snap a utilization vector to 1/" + std::to_string(denominator));
}

namespace {

Rational draw_period(const GenConfig& c, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> log_dist(std::log(c.period_lo), std::log(c.period_hi));
    const double x = std::exp(log_dist(rng));
    if (!c.period_choices.empty()) {
        const Rational* best = &c.period_choices.front();
        double best_gap = std::abs(std::log(best->to_double()) - std::log(x));
        for (const auto& p : c.period_choices) {
            const double gap = std::abs(std::log(p.to_double()) - std::log(x));
            if (gap < best_gap) {
                best = &p;
                best_gap = gap;
            }
        }
        return *best;
    }
    return max(Rational::snap(x, c.period_denominator), Rational(1, c.period_denominator));
}

} // namespace

std::vector<SporadicTask> generate(const GenConfig& c)
{
    GenConfig config = c;
    if (!config.period_choices.empty()) {
        config.period_lo = config.period_choices.front().to_double();
        config.period_hi = config.period_lo;
        for (const auto& p : config.period_choices) {
            config.period_lo = std::min(config.period_lo, p.to_double());
            config.period_hi = std::max(config.period_hi, p.to_double());
        }
    }
    validate(config);
    std::mt19937_64 rng(config.seed);
    const auto u = snapped_utilizations(config.tasks, config.total_utilization, config.utilization_denominator, rng,
                                        config.resample_limit);
    std::uniform_real_distribution<double> ratio_dist(config.ratio_lo, config.ratio_hi);
    std::vector<SporadicTask> tasks;
    tasks.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Rational period = draw_period(config, rng);
        Rational ratio;
        int redraws = 0;
        do {
            if (++redraws > config.resample_limit)
                throw Error(ErrorCode::ResampleLimit, "deadline ratio below utilization " + u[i].str());
            ratio = Rational::snap(ratio_dist(rng), config.ratio_denominator);
        } while (ratio < u[i]);
        tasks.emplace_back(static_cast<int>(i), u[i] * period, ratio * period, Period(period));
    }
    return tasks;
}

} // namespace gfp
