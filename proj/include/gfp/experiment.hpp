#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gfp/generator.hpp"
#include "gfp/sched_tests.hpp"
#include "gfp/task_model.hpp"

namespace gfp {

struct SweepConfig {
    std::vector<int> processors{8};
    /// N = tasks_per_processor * M unless `tasks` is set.
    int tasks_per_processor = 5;
    std::optional<int> tasks;
    /// Utilization grid in percent of M.
    int utilization_pct_start = 5;
    int utilization_pct_stop = 100;
    int utilization_pct_step = 5;
    int sets_per_point = 100;
    PriorityPolicy policy = PriorityPolicy::DeadlineMonotonic;
    std::vector<TestId> tests{TestId::BF, TestId::T47, TestId::T46, TestId::T45, TestId::T44};
    /// One series per period range.
    std::vector<std::pair<double, double>> period_ranges{{1, 10}, {1, 100}, {1, 1000}};
    std::pair<double, double> deadline_ratio{0.8, 2.0};
    std::uint64_t seed = 1;
    /// Template for generated sets; tasks, utilization, periods, ratio and
    /// seed are overwritten per set.
    GenConfig generator{};
    AnalysisOptions analysis{};
};

/// Reads the flat `key = value` subset of TOML used for sweep configs:
/// integers, floats, strings, booleans, and (nested) arrays of these.
/// Keys: processors, tasks_per_processor, tasks, utilization_pct_start,
/// utilization_pct_stop, utilization_pct_step, sets_per_point, policy, tests,
/// period_ranges, deadline_ratio, seed, ell_max, scan_budget, grain_limit,
/// utilization_denominator, period_denominator, ratio_denominator,
/// resample_limit. Unknown keys throw ParseError.
SweepConfig parse_sweep_config(std::istream& in);
SweepConfig read_sweep_config(const std::filesystem::path& path);

struct SweepPoint {
    int processors = 0;
    int tasks = 0;
    std::pair<double, double> periods;
    int utilization_pct = 0;
    int sets = 0;
    /// Set when generation failed before `sets_per_point` sets were produced.
    bool incomplete = false;
    std::string note;
    std::map<TestId, int> accepted;
    /// Sets accepted by at least one test.
    int accepted_any = 0;
    double seconds = 0;

    double ratio(TestId id) const;
    double ratio_any() const;
};

struct DominanceViolation {
    std::string relation; ///< e.g. "t47 => t46"
    int task_id = -1;     ///< -1 for a set-level violation
    TaskSystem system;
};

struct SweepResult {
    std::vector<TestId> tests;
    std::vector<SweepPoint> points;
    std::vector<DominanceViolation> violations;
    double seconds = 0;
};

SweepResult run_sweep(const SweepConfig& config);

/// Per-task verdict implications: t47 => t46, t46 <=> t45, t45 => t44,
/// t44 => exact, and bf => t47 for deadline-monotonic systems. Tests not
/// listed in `tests` are skipped.
std::vector<DominanceViolation> dominance_audit(const std::vector<TaskSystem>& corpus,
                                                const std::vector<TestId>& tests,
                                                const AnalysisOptions& options = {});

/// Same implications over set-level acceptance of one system.
std::vector<std::string> set_dominance_violations(const std::map<TestId, bool>& accepted, bool deadline_monotonic);

/// Writes one CSV (utilization_pct,test_name,acceptance_ratio) and one
/// gnuplot script per (M, period range) series, plus points.csv with per-point
/// metadata. Returns the CSV paths in series order.
std::vector<std::filesystem::path> emit_plot_data(const SweepResult& result, const std::filesystem::path& dir);

/// Rows for one series, header included. The "all" row (union of the tests)
/// is written only when more than one test ran.
void write_series_csv(std::ostream& out, const SweepResult& result, std::span<const SweepPoint* const> points);

} // namespace gfp
