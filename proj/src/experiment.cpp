#include "gfp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gfp/error.hpp"
#include "json.hpp"

namespace gfp {

using nlohmann::json;

namespace {

Error config_error(const std::string& what) { return Error(ErrorCode::ParseError, "sweep config: " + what); }

std::string strip_comment(const std::string& line)
{
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\'))
            in_string = !in_string;
        else if (line[i] == '#' && !in_string)
            return line.substr(0, i);
    }
    return line;
}

int bracket_depth(const std::string& text)
{
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '"' && (i == 0 || text[i - 1] != '\\'))
            in_string = !in_string;
        else if (!in_string && text[i] == '[')
            ++depth;
        else if (!in_string && text[i] == ']')
            --depth;
    }
    return depth;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// TOML scalars and arrays in this subset are JSON once trailing commas go.
json parse_toml_value(std::string text)
{
    std::string cleaned;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '"' && (i == 0 || text[i - 1] != '\\'))
            in_string = !in_string;
        if (!in_string && c == ',') {
            const auto next = text.find_first_not_of(" \t\r\n", i + 1);
            if (next != std::string::npos && text[next] == ']')
                continue;
        }
        cleaned.push_back(c);
    }
    return json::parse(cleaned);
}

json toml_to_json(std::istream& in)
{
    json out = json::object();
    std::string line, pending_key, pending_value;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (!pending_key.empty()) {
            pending_value += ' ' + line;
        } else {
            if (line.empty() || line.front() == '[')
                continue; // blank or table header
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error("line " + std::to_string(line_no) + ": expected key = value");
            pending_key = trim(line.substr(0, eq));
            pending_value = trim(line.substr(eq + 1));
        }
        if (bracket_depth(pending_value) > 0)
            continue;
        try {
            out[pending_key] = parse_toml_value(pending_value);
        } catch (const json::exception& e) {
            throw config_error("line " + std::to_string(line_no) + ": bad value for '" + pending_key + "'");
        }
        pending_key.clear();
        pending_value.clear();
    }
    if (!pending_key.empty())
        throw config_error("unterminated array for '" + pending_key + "'");
    return out;
}

template <typename T>
T get_as(const json& v, const std::string& key)
{
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw config_error("wrong type for '" + key + "'");
    }
}

SweepConfig config_from_json(const json& j)
{
    if (!j.is_object())
        throw config_error("top level must be a table");
    SweepConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "processors") {
            c.processors = v.is_array() ? get_as<std::vector<int>>(v, key) : std::vector<int>{get_as<int>(v, key)};
        } else if (key == "tasks_per_processor") {
            c.tasks_per_processor = get_as<int>(v, key);
        } else if (key == "tasks") {
            c.tasks = get_as<int>(v, key);
        } else if (key == "utilization_pct_start") {
            c.utilization_pct_start = get_as<int>(v, key);
        } else if (key == "utilization_pct_stop") {
            c.utilization_pct_stop = get_as<int>(v, key);
        } else if (key == "utilization_pct_step") {
            c.utilization_pct_step = get_as<int>(v, key);
        } else if (key == "sets_per_point") {
            c.sets_per_point = get_as<int>(v, key);
        } else if (key == "policy") {
            const auto p = parse_policy(get_as<std::string>(v, key));
            if (!p || *p == PriorityPolicy::AsGiven)
                throw config_error("policy must be dm or sm");
            c.policy = *p;
        } else if (key == "tests") {
            c.tests.clear();
            for (const auto& name : get_as<std::vector<std::string>>(v, key)) {
                const auto id = parse_test_id(name);
                if (!id)
                    throw config_error("unknown test '" + name + "'");
                c.tests.push_back(*id);
            }
        } else if (key == "period_ranges") {
            c.period_ranges.clear();
            for (const auto& r : get_as<std::vector<std::vector<double>>>(v, key)) {
                if (r.size() != 2)
                    throw config_error("period range needs two values");
                c.period_ranges.emplace_back(r[0], r[1]);
            }
        } else if (key == "deadline_ratio") {
            const auto r = get_as<std::vector<double>>(v, key);
            if (r.size() != 2)
                throw config_error("deadline_ratio needs two values");
            c.deadline_ratio = {r[0], r[1]};
        } else if (key == "seed") {
            c.seed = get_as<std::uint64_t>(v, key);
        } else if (key == "ell_max") {
            c.analysis.ell_max = get_as<int>(v, key);
        } else if (key == "scan_budget") {
            c.analysis.scan_budget = get_as<std::uint64_t>(v, key);
        } else if (key == "grain_limit") {
            c.analysis.grain_limit = get_as<std::uint64_t>(v, key);
            c.analysis.load.grain_limit = c.analysis.grain_limit;
        } else if (key == "utilization_denominator") {
            c.generator.utilization_denominator = get_as<long>(v, key);
        } else if (key == "period_denominator") {
            c.generator.period_denominator = get_as<long>(v, key);
        } else if (key == "ratio_denominator") {
            c.generator.ratio_denominator = get_as<long>(v, key);
        } else if (key == "resample_limit") {
            c.generator.resample_limit = get_as<int>(v, key);
        } else {
            throw config_error("unknown key '" + key + "'");
        }
    }
    if (c.processors.empty() || c.period_ranges.empty() || c.tests.empty())
        throw config_error("processors, period_ranges and tests must be non-empty");
    for (int m : c.processors)
        if (m < 2)
            throw config_error("every M must be >= 2");
    if (c.utilization_pct_step < 1 || c.utilization_pct_start < 1 || c.utilization_pct_stop > 100 ||
        c.utilization_pct_start > c.utilization_pct_stop)
        throw config_error("utilization grid must satisfy 1 <= start <= stop <= 100, step >= 1");
    if (c.sets_per_point < 1)
        throw config_error("sets_per_point must be >= 1");
    if (c.policy != PriorityPolicy::DeadlineMonotonic)
        for (TestId t : c.tests)
            if (t == TestId::BF)
                throw config_error("the bf test needs policy dm");
    return c;
}

} // namespace

SweepConfig parse_sweep_config(std::istream& in) { return config_from_json(toml_to_json(in)); }

SweepConfig read_sweep_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    if (path.extension() == ".json") {
        try {
            return config_from_json(json::parse(in));
        } catch (const json::exception& e) {
            throw config_error(e.what());
        }
    }
    return parse_sweep_config(in);
}

double SweepPoint::ratio(TestId id) const
{
    const auto it = accepted.find(id);
    return sets == 0 || it == accepted.end() ? 0.0 : static_cast<double>(it->second) / sets;
}

double SweepPoint::ratio_any() const { return sets == 0 ? 0.0 : static_cast<double>(accepted_any) / sets; }

std::vector<std::string> set_dominance_violations(const std::map<TestId, bool>& accepted, bool deadline_monotonic)
{
    std::vector<std::string> out;
    const auto has = [&](TestId t) { return accepted.count(t) > 0; };
    const auto implies = [&](TestId a, TestId b) {
        if (has(a) && has(b) && accepted.at(a) && !accepted.at(b))
            out.push_back(std::string(to_string(a)) + " => " + std::string(to_string(b)));
    };
    implies(TestId::T47, TestId::T46);
    implies(TestId::T46, TestId::T45);
    implies(TestId::T45, TestId::T46);
    implies(TestId::T45, TestId::T44);
    implies(TestId::T44, TestId::Exact);
    if (deadline_monotonic)
        implies(TestId::BF, TestId::T47);
    return out;
}

SweepResult run_sweep(const SweepConfig& config)
{
    const auto start = std::chrono::steady_clock::now();
    SweepResult result;
    result.tests = config.tests;
    AnalysisOptions options = config.analysis;
    options.stop_at_first_failure = true;

    std::uint64_t point_index = 0;
    for (int m : config.processors) {
        const int n = config.tasks ? *config.tasks : config.tasks_per_processor * m;
        for (const auto& range : config.period_ranges) {
            for (int pct = config.utilization_pct_start; pct <= config.utilization_pct_stop;
                 pct += config.utilization_pct_step, ++point_index) {
                const auto point_start = std::chrono::steady_clock::now();
                SweepPoint point;
                point.processors = m;
                point.tasks = n;
                point.periods = range;
                point.utilization_pct = pct;
                for (TestId t : config.tests)
                    point.accepted[t] = 0;
                for (int j = 0; j < config.sets_per_point; ++j) {
                    GenConfig gen = config.generator;
                    gen.tasks = n;
                    gen.total_utilization = pct * m / 100.0;
                    gen.period_lo = range.first;
                    gen.period_hi = range.second;
                    gen.ratio_lo = config.deadline_ratio.first;
                    gen.ratio_hi = config.deadline_ratio.second;
                    gen.seed = config.seed + point_index * 1'000'003ULL + static_cast<std::uint64_t>(j);
                    std::vector<SporadicTask> tasks;
                    try {
                        tasks = generate(gen);
                    } catch (const Error& e) {
                        point.incomplete = true;
                        point.note = e.what();
                        break;
                    }
                    const TaskSystem sys = assign_priorities(std::move(tasks), config.policy, m);
                    std::map<TestId, bool> accepted;
                    for (TestId t : config.tests) {
                        const bool ok = run_test(t, sys, options).overall == Verdict::Schedulable;
                        accepted[t] = ok;
                        point.accepted[t] += ok ? 1 : 0;
                    }
                    ++point.sets;
                    const bool any = std::any_of(accepted.begin(), accepted.end(), [](auto& kv) { return kv.second; });
                    point.accepted_any += any ? 1 : 0;
                    for (auto& relation : set_dominance_violations(accepted, sys.is_deadline_monotonic()))
                        result.violations.push_back({std::move(relation), -1, sys});
                }
                point.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - point_start).count();
                result.points.push_back(std::move(point));
            }
        }
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<DominanceViolation> dominance_audit(const std::vector<TaskSystem>& corpus, const std::vector<TestId>& tests,
                                                const AnalysisOptions& options)
{
    std::vector<DominanceViolation> out;
    for (const auto& sys : corpus) {
        const bool dm = sys.is_deadline_monotonic();
        for (std::size_t k = 0; k < sys.size(); ++k) {
            std::map<TestId, bool> accepted;
            for (TestId t : tests) {
                if (t == TestId::BF && !dm)
                    continue;
                accepted[t] = run_task_test(t, sys, k, options).verdict == Verdict::Schedulable;
            }
            for (auto& relation : set_dominance_violations(accepted, dm))
                out.push_back({std::move(relation), sys.task(k).id(), sys});
        }
    }
    return out;
}

namespace {

std::string number_text(double x)
{
    std::ostringstream s;
    s << x;
    return s.str();
}

std::string series_name(int m, const std::pair<double, double>& range)
{
    return "acceptance_M" + std::to_string(m) + "_T" + number_text(range.first) + "-" + number_text(range.second);
}

void write_gnuplot(const std::filesystem::path& script, const std::string& csv_name, const SweepResult& result,
                   const std::string& title)
{
    std::ofstream out(script);
    out << "set datafile separator ','\n"
        << "set title '" << title << "'\n"
        << "set xlabel 'Utilization (% of M)'\n"
        << "set ylabel 'Acceptance ratio'\n"
        << "set yrange [0:1.05]\n"
        << "set key outside right\n"
        << "set terminal pngcairo size 900,600\n"
        << "set output '" << csv_name.substr(0, csv_name.size() - 4) << ".png'\n"
        << "tests = \"";
    for (TestId t : result.tests)
        out << to_string(t) << ' ';
    out << (result.tests.size() < 2 ? "" : "all") << "\"\n"
        << "plot for [t in tests] '" << csv_name
        << "' using 1:(strcol(2) eq t ? $3 : 1/0) with linespoints title t\n";
}

} // namespace

void write_series_csv(std::ostream& out, const SweepResult& result, std::span<const SweepPoint* const> points)
{
    out << "utilization_pct,test_name,acceptance_ratio\n";
    char buf[32];
    for (const SweepPoint* p : points) {
        for (TestId t : result.tests) {
            std::snprintf(buf, sizeof buf, "%.6f", p->ratio(t));
            out << p->utilization_pct << ',' << to_string(t) << ',' << buf << '\n';
        }
        if (result.tests.size() < 2)
            continue;
        std::snprintf(buf, sizeof buf, "%.6f", p->ratio_any());
        out << p->utilization_pct << ",all," << buf << '\n';
    }
}

std::vector<std::filesystem::path> emit_plot_data(const SweepResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    std::vector<std::pair<std::string, std::vector<const SweepPoint*>>> series;
    for (const auto& p : result.points) {
        const std::string name = series_name(p.processors, p.periods);
        if (series.empty() || series.back().first != name)
            series.push_back({name, {}});
        series.back().second.push_back(&p);
    }
    if (series.empty()) {
        const auto path = dir / "acceptance.csv";
        std::ofstream out(path);
        write_series_csv(out, result, {});
        files.push_back(path);
    }
    for (const auto& [name, points] : series) {
        const auto path = dir / (name + ".csv");
        std::ofstream out(path);
        write_series_csv(out, result, points);
        write_gnuplot(dir / (name + ".gp"), name + ".csv", result, name);
        files.push_back(path);
    }

    std::ofstream meta(dir / "points.csv");
    meta << "processors,tasks,period_lo,period_hi,utilization_pct,sets,incomplete,note\n";
    for (const auto& p : result.points)
        meta << p.processors << ',' << p.tasks << ',' << number_text(p.periods.first) << ','
             << number_text(p.periods.second) << ',' << p.utilization_pct << ',' << p.sets << ','
             << (p.incomplete ? "INCOMPLETE" : "complete") << ",\"" << p.note << "\"\n";
    std::ofstream timing(dir / "timing.csv");
    timing << "processors,period_lo,period_hi,utilization_pct,seconds\n";
    for (const auto& p : result.points)
        timing << p.processors << ',' << number_text(p.periods.first) << ',' << number_text(p.periods.second) << ','
               << p.utilization_pct << ',' << p.seconds << '\n';
    return files;
}

} // namespace gfp
