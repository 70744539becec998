#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gfp/rational.hpp"
#include "gfp/task_model.hpp"

namespace gfp {

struct GenConfig {
    int tasks = 10;
    /// Sum of utilizations (absolute, 0 < total <= tasks).
    double total_utilization = 1.0;
    /// Log-uniform period range.
    double period_lo = 1;
    double period_hi = 100;
    /// When non-empty, each sampled period is replaced by the log-nearest value.
    std::vector<Rational> period_choices;
    /// D = r T with r uniform in [ratio_lo, ratio_hi].
    double ratio_lo = 0.8;
    double ratio_hi = 2.0;
    std::uint64_t seed = 1;
    long utilization_denominator = 1'000'000;
    long period_denominator = 1'000'000;
    long ratio_denominator = 1'000'000;
    /// Cap on whole-vector discards and on per-task deadline-ratio redraws.
    int resample_limit = 100'000;
};

/// Throws InvalidArgument when a field is out of range.
void validate(const GenConfig& config);

/// UUniFast utilization vector summing to `total`, discarded and redrawn
/// while any entry exceeds 1. Throws ResampleLimit after `limit` discards.
std::vector<double> uunifast_discard(int n, double total, std::mt19937_64& rng, int limit = 100'000);
std::vector<double> uunifast_discard(int n, double total, std::uint64_t seed, int limit = 100'000);

/// Utilizations snapped to 1/denominator whose sum is exactly
/// snap(total): the last entry absorbs the rounding. Vectors with an entry
/// outside (0, 1] after snapping are redrawn.
std::vector<Rational> snapped_utilizations(int n, double total, long denominator, std::mt19937_64& rng,
                                           int limit = 100'000);

/// Random task list with ids 0..N-1 (no priority order applied).
/// C = U T exactly, D = r T; r is redrawn while r < U so that C <= D.
std::vector<SporadicTask> generate(const GenConfig& config);

} // namespace gfp
