#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gfp/task_model.hpp"

namespace gfp {

/// Contents of a task-set file before a priority policy is applied.
struct TaskSetFile {
    int processors = 0;
    std::vector<SporadicTask> tasks; ///< file order, ids 0..N-1
};

// Format:
//   # comment
//   M 4
//   C D T          one task per line; decimals or p/q; T may be "inf".
// Fields may carry an optional "C=", "D=", "T=" prefix, so "T=inf" is valid.
TaskSetFile parse_taskset(std::istream& in);
TaskSetFile read_taskset(const std::filesystem::path& path);

void write_taskset(std::ostream& out, int processors, std::span<const SporadicTask> tasks);
void write_taskset(const std::filesystem::path& path, int processors, std::span<const SporadicTask> tasks);

} // namespace gfp
