#include "gfp/taskset_io.hpp"

#include <fstream>
#include <sstream>

#include "gfp/error.hpp"

namespace gfp {

namespace {

std::string strip_field_prefix(std::string token, char field)
{
    if (token.size() > 2 && (token[0] == field || token[0] == field + ('a' - 'A')) && token[1] == '=')
        return token.substr(2);
    return token;
}

Error parse_error(int line_no, const std::string& what)
{
    return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

} // namespace

TaskSetFile parse_taskset(std::istream& in)
{
    TaskSetFile file;
    bool have_m = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;)
            tokens.push_back(tok);
        if (tokens.empty())
            continue;

        if (tokens[0] == "M" || tokens[0] == "m") {
            if (have_m)
                throw parse_error(line_no, "duplicate M header");
            if (tokens.size() != 2)
                throw parse_error(line_no, "expected 'M <int>'");
            try {
                std::size_t used = 0;
                file.processors = std::stoi(tokens[1], &used);
                if (used != tokens[1].size())
                    throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw parse_error(line_no, "M must be an integer, got '" + tokens[1] + "'");
            }
            have_m = true;
            continue;
        }

        if (tokens.size() != 3)
            throw parse_error(line_no, "expected 'C D T', got " + std::to_string(tokens.size()) + " fields");
        try {
            const Rational c = Rational::parse(strip_field_prefix(tokens[0], 'C'));
            const Rational d = Rational::parse(strip_field_prefix(tokens[1], 'D'));
            const std::string t_text = strip_field_prefix(tokens[2], 'T');
            const Period t = (t_text == "inf" || t_text == "INF" || t_text == "infinity")
                                 ? Period::infinite()
                                 : Period(Rational::parse(t_text));
            file.tasks.emplace_back(static_cast<int>(file.tasks.size()), c, d, t);
        } catch (const Error& e) {
            throw parse_error(line_no, e.what());
        }
    }
    if (!have_m)
        throw Error(ErrorCode::ParseError, "missing 'M <int>' header");
    return file;
}

TaskSetFile read_taskset(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    return parse_taskset(in);
}

void write_taskset(std::ostream& out, int processors, std::span<const SporadicTask> tasks)
{
    out << "M " << processors << '\n';
    out << "# C D T\n";
    for (const auto& t : tasks)
        out << t.wcet().str() << ' ' << t.deadline().str() << ' ' << t.period().str() << '\n';
}

void write_taskset(const std::filesystem::path& path, int processors, std::span<const SporadicTask> tasks)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::ParseError, "cannot write " + path.string());
    write_taskset(out, processors, tasks);
}

} // namespace gfp
