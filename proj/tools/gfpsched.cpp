#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gfp/error.hpp"
#include "gfp/experiment.hpp"
#include "gfp/generator.hpp"
#include "gfp/lower_bound.hpp"
#include "gfp/sched_tests.hpp"
#include "gfp/simulator.hpp"
#include "gfp/taskset_io.hpp"
#include "gfp/workload.hpp"
#include "json.hpp"

using namespace gfp;
using nlohmann::json;

namespace {

PriorityPolicy policy_arg(const std::string& name)
{
    const auto p = parse_policy(name);
    if (!p)
        throw Error(ErrorCode::InvalidArgument, "unknown policy '" + name + "' (dm, sm, given)");
    return *p;
}

std::vector<TestId> tests_arg(const std::string& list)
{
    std::vector<TestId> out;
    std::stringstream in(list);
    for (std::string name; std::getline(in, name, ',');) {
        if (name.empty())
            continue;
        const auto id = parse_test_id(name);
        if (!id)
            throw Error(ErrorCode::InvalidArgument, "unknown test '" + name + "'");
        out.push_back(*id);
    }
    return out;
}

std::pair<double, double> range_arg(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorCode::InvalidArgument, "expected lo:hi, got '" + text + "'");
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

TaskSystem load_system(const std::string& path, const std::string& policy)
{
    auto file = read_taskset(path);
    return assign_priorities(std::move(file.tasks), policy_arg(policy), file.processors);
}

json verdict_json(const TestVerdict& v, const TaskSystem& sys)
{
    json tasks = json::array();
    for (const auto& t : v.tasks) {
        json w = json::array();
        for (const auto& x : t.witnesses)
            w.push_back({{"ell", x.ell}, {"rho", x.rho.str()}});
        json j = {{"index", t.index},
                  {"id", t.task_id},
                  {"verdict", to_string(t.verdict)},
                  {"witnesses", w},
                  {"ell_tail_used", t.ell_tail_used},
                  {"ell_tail_unresolved", t.ell_tail_unresolved},
                  {"guard_failed", t.guard_failed},
                  {"scan_budget_exceeded", t.scan_budget_exceeded},
                  {"hyperperiod_overflow", t.hyperperiod_overflow}};
        if (t.failed_ell)
            j["failed_ell"] = *t.failed_ell;
        if (t.violated_delta)
            j["violated_delta"] = t.violated_delta->str();
        tasks.push_back(std::move(j));
    }
    return {{"test", to_string(v.test)},
            {"processors", sys.processors()},
            {"policy", to_string(sys.policy())},
            {"overall", to_string(v.overall)},
            {"stopped_early", v.stopped_early},
            {"wall_seconds", v.wall_seconds},
            {"tasks", tasks}};
}

int cmd_analyze(const std::string& path, const std::string& policy, const std::string& tests, int ell_max,
                const std::string& json_out, bool quiet)
{
    const TaskSystem sys = load_system(path, policy);
    AnalysisOptions options;
    options.ell_max = ell_max;
    std::vector<TestVerdict> verdicts;
    for (TestId id : tests_arg(tests)) {
        try {
            verdicts.push_back(run_test(id, sys, options));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PolicyMismatch)
                throw;
            std::cerr << to_string(id) << ": " << e.what() << '\n';
        }
    }

    if (!quiet) {
        std::cout << "M = " << sys.processors() << ", N = " << sys.size() << ", policy " << to_string(sys.policy())
                  << "\n\n";
        std::cout << std::left << std::setw(6) << "prio" << std::setw(6) << "id" << std::setw(14) << "C"
                  << std::setw(14) << "D" << std::setw(14) << "T";
        for (const auto& v : verdicts)
            std::cout << std::setw(8) << to_string(v.test);
        std::cout << '\n';
        for (std::size_t k = 0; k < sys.size(); ++k) {
            const auto& t = sys.task(k);
            std::cout << std::setw(6) << k << std::setw(6) << t.id() << std::setw(14) << t.wcet().str()
                      << std::setw(14) << t.deadline().str() << std::setw(14) << t.period().str();
            for (const auto& v : verdicts) {
                const char* mark = "-";
                if (k < v.tasks.size())
                    mark = v.tasks[k].verdict == Verdict::Schedulable ? "ok" : "FAIL";
                std::cout << std::setw(8) << mark;
            }
            std::cout << '\n';
        }
        std::cout << '\n';
        for (const auto& v : verdicts)
            std::cout << std::setw(8) << to_string(v.test) << to_string(v.overall) << "  (" << v.wall_seconds
                      << " s)\n";
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!json_out.empty() && json_out != "-") {
        file.open(json_out);
        out = &file;
    }
    if (!json_out.empty())
        for (const auto& v : verdicts)
            *out << verdict_json(v, sys).dump() << '\n';
    const bool all_ok = std::all_of(verdicts.begin(), verdicts.end(),
                                    [](const TestVerdict& v) { return v.overall == Verdict::Schedulable; });
    return all_ok ? 0 : 3;
}

std::vector<std::vector<Rational>> read_release_file(const std::string& path)
{
    // One line per task in priority order: space-separated release times.
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::vector<std::vector<Rational>> out;
    for (std::string line; std::getline(in, line);) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::vector<Rational> row;
        for (std::string tok; fields >> tok;)
            row.push_back(Rational::parse(tok));
        if (!row.empty() || !line.empty())
            out.push_back(std::move(row));
    }
    return out;
}

int cmd_simulate(const std::string& path, const std::string& policy, const std::string& pattern,
                 const std::string& horizon_text, const std::string& speed_text, const std::string& trace_out,
                 const std::string& releases, std::uint64_t seed, bool stop_on_miss)
{
    const TaskSystem sys = load_system(path, policy);
    const Rational horizon = Rational::parse(horizon_text);
    ArrivalPattern arrivals = SynchronousPeriodic{horizon};
    if (pattern == "random")
        arrivals = RandomSporadic{seed, horizon};
    else if (pattern == "file")
        arrivals = ExplicitReleases{read_release_file(releases), horizon};
    else if (pattern != "sync")
        throw Error(ErrorCode::InvalidArgument, "pattern must be sync, file or random");

    SimOptions options;
    options.stop_on_first_miss = stop_on_miss;
    const SimTrace trace = simulate(sys, arrivals, Rational::parse(speed_text), options);
    if (!trace_out.empty()) {
        std::ofstream out(trace_out);
        write_trace_csv(out, trace);
    }
    std::size_t misses = 0;
    for (const auto& e : trace.events) {
        if (e.kind != EventKind::Miss)
            continue;
        ++misses;
        std::cout << "MISS task " << e.task << " job " << e.job << " at t=" << e.time.str() << '\n';
    }
    std::cout << to_string(trace.outcome) << " (" << trace.events.size() << " events, " << misses << " misses)\n";
    return trace.outcome == SimOutcome::MissFound ? 3 : 0;
}

int cmd_generate(int n, int m, double u, const std::string& periods, const std::string& dratio, std::uint64_t seed,
                 long denominator, const std::string& out)
{
    GenConfig c;
    c.tasks = n;
    c.total_utilization = u * m;
    std::tie(c.period_lo, c.period_hi) = range_arg(periods);
    std::tie(c.ratio_lo, c.ratio_hi) = range_arg(dratio);
    c.seed = seed;
    c.utilization_denominator = c.period_denominator = c.ratio_denominator = denominator;
    const auto tasks = generate(c);
    if (out.empty() || out == "-")
        write_taskset(std::cout, m, tasks);
    else
        write_taskset(std::filesystem::path(out), m, tasks);
    return 0;
}

int cmd_curves(const std::string& c, const std::string& d, const std::string& t, const std::string& rho,
               const std::string& from, const std::string& to, const std::string& step, const std::string& out)
{
    const SporadicTask task(0, Rational::parse(c), Rational::parse(d),
                            t == "inf" ? Period::infinite() : Period(Rational::parse(t)));
    const Rational lo = Rational::parse(from), hi = Rational::parse(to), dt = Rational::parse(step);
    if (dt.sign() <= 0)
        throw Error(ErrorCode::InvalidArgument, "step must be > 0");
    std::vector<Rational> deltas;
    for (Rational x = lo; x <= hi; x += dt)
        deltas.push_back(x);
    const auto rows = workload_curves(task, Rational::parse(rho), deltas);
    if (out.empty() || out == "-") {
        write_curves_csv(std::cout, rows);
    } else {
        std::ofstream file(out);
        write_curves_csv(file, rows);
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir)
{
    const SweepConfig config = read_sweep_config(config_path);
    const SweepResult result = run_sweep(config);
    const auto files = emit_plot_data(result, out_dir);
    for (const auto& p : result.points)
        if (p.incomplete)
            std::cerr << "INCOMPLETE point M=" << p.processors << " U=" << p.utilization_pct << "%: " << p.note << '\n';
    for (const auto& f : files)
        std::cout << "wrote " << f.string() << '\n';
    std::cout << result.points.size() << " points in " << result.seconds << " s, " << result.violations.size()
              << " dominance violations\n";
    if (!result.violations.empty()) {
        for (const auto& v : result.violations) {
            std::cerr << "dominance violation " << v.relation << " on:\n";
            write_taskset(std::cerr, v.system.processors(), v.system.tasks());
        }
        return 2;
    }
    return 0;
}

int cmd_counterexample(int m, const std::string& eps_text, const std::string& out)
{
    const Rational eps = Rational::parse(eps_text);
    const TaskSystem sys = counterexample_taskset(m, eps);
    if (!out.empty())
        write_taskset(std::filesystem::path(out), m, sys.tasks());
    const LowerBoundReport r = verify_lower_bound_construction(m, eps);
    std::cout << "DM miss of task " << 2 * m << " at t=1: " << (r.dm_miss_at_one ? "yes" : "no")
              << " (executed " << r.last_task_execution.str() << ")\n";
    std::cout << "semi-partitioned speed s = " << r.speed.str() << '\n';
    for (const auto& c : r.conditions)
        std::cout << "  " << std::left << std::setw(18) << c.name << c.value.str() << " <= " << c.limit.str() << "  "
                  << (c.pass ? "PASS" : "FAIL") << '\n';
    std::cout << "implied speedup lower bound 3M/((1+eps)(M+1)) = " << implied_speedup_lower_bound(m, eps).str()
              << '\n';
    return r.passed() ? 0 : 3;
}

int cmd_necessary(const std::string& path, const std::string& policy)
{
    const TaskSystem sys = load_system(path, policy);
    const auto s = necessary_condition_speed(sys);
    std::cout << "necessary speed " << s.value.str() << " (" << s.value.to_double() << ")"
              << (s.partial ? " PARTIAL: load not computable" : "") << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Schedulability analysis for global fixed-priority multiprocessor scheduling"};
    app.require_subcommand(1);

    std::string path, policy = "dm", tests = "bf,t47,t46,t45,t44,exact", json_out;
    int ell_max = 32;
    bool quiet = false;
    auto* analyze = app.add_subcommand("analyze", "Run schedulability tests on a task-set file");
    analyze->add_option("taskset", path, "Task-set file")->required();
    analyze->add_option("--policy", policy, "dm, sm or given");
    analyze->add_option("--tests", tests, "Comma-separated: bf,exact,t44,t45,t46,t47");
    analyze->add_option("--ell-max", ell_max, "Largest ell checked before the closed-form tail")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--json", json_out, "Write JSON-lines verdicts to a file ('-' for stdout)");
    analyze->add_flag("--quiet", quiet, "Suppress the table");

    std::string pattern = "sync", horizon = "100", speed = "1", trace_out, releases;
    std::uint64_t seed = 1;
    bool stop_on_miss = false;
    auto* sim = app.add_subcommand("simulate", "Simulate global fixed-priority scheduling");
    sim->add_option("taskset", path, "Task-set file")->required();
    sim->add_option("--policy", policy, "dm, sm or given");
    sim->add_option("--pattern", pattern, "sync, file or random");
    sim->add_option("--horizon", horizon, "Simulation horizon (rational)");
    sim->add_option("--speed", speed, "Processor speed p/q");
    sim->add_option("--trace", trace_out, "Trace CSV output");
    sim->add_option("--releases", releases, "Release-time file for --pattern file");
    sim->add_option("--seed", seed, "Seed for --pattern random");
    sim->add_flag("--stop-on-miss", stop_on_miss, "Stop at the first deadline miss");

    int n = 10, m = 4;
    double u = 0.5;
    std::string periods = "1:100", dratio = "0.8:2", out;
    long denominator = 1'000'000;
    auto* gen = app.add_subcommand("generate", "Generate a random task set");
    gen->add_option("--n", n, "Number of tasks")->check(CLI::PositiveNumber);
    gen->add_option("--m", m, "Processors")->check(CLI::Range(2, 1 << 20));
    gen->add_option("--u", u, "Total utilization as a fraction of M");
    gen->add_option("--periods", periods, "Period range lo:hi (log-uniform)");
    gen->add_option("--dratio", dratio, "Deadline/period ratio range lo:hi");
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("--denominator", denominator, "Snap denominator");
    gen->add_option("--out", out, "Output file (default stdout)");

    std::string c = "3", d = "45", t = "10", rho = "1", from = "0", to = "60", step = "1";
    auto* curves = app.add_subcommand("curves", "Dump workload curves of one task as CSV");
    curves->add_option("--C", c, "WCET");
    curves->add_option("--D", d, "Relative deadline");
    curves->add_option("--T", t, "Period or inf");
    curves->add_option("--rho", rho, "Light-task threshold");
    curves->add_option("--from", from, "First delta");
    curves->add_option("--to", to, "Last delta");
    curves->add_option("--step", step, "Delta step");
    curves->add_option("--out", out, "Output CSV (default stdout)");

    std::string config, out_dir = "sweep_out";
    auto* sweep = app.add_subcommand("sweep", "Run an acceptance-ratio sweep");
    sweep->add_option("--config", config, "Sweep config (.toml or .json)")->required();
    sweep->add_option("--out", out_dir, "Output directory");

    std::string eps = "1/3";
    auto* cex = app.add_subcommand("counterexample", "Check the global DM lower-bound construction");
    cex->add_option("--m", m, "Processors")->check(CLI::Range(2, 1 << 20));
    cex->add_option("--eps", eps, "epsilon with 1/eps integer");
    cex->add_option("--out", out, "Write the task set to a file");

    auto* nec = app.add_subcommand("necessary", "Necessary speed for feasibility");
    nec->add_option("taskset", path, "Task-set file")->required();
    nec->add_option("--policy", policy, "dm, sm or given");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*analyze)
            return cmd_analyze(path, policy, tests, ell_max, json_out, quiet);
        if (*sim)
            return cmd_simulate(path, policy, pattern, horizon, speed, trace_out, releases, seed, stop_on_miss);
        if (*gen)
            return cmd_generate(n, m, u, periods, dratio, seed, denominator, out);
        if (*curves)
            return cmd_curves(c, d, t, rho, from, to, step, out);
        if (*sweep)
            return cmd_sweep(config, out_dir);
        if (*cex)
            return cmd_counterexample(m, eps, out);
        if (*nec)
            return cmd_necessary(path, policy);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
