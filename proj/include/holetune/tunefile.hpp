#pragma once

#include "holetune/coloring.hpp"
#include "holetune/holes.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace holetune {

/// Value of every context hole. Booleans are stored as 0/1.
using Assignment = std::map<ContextHole, std::int64_t>;

/// The defaults of every (hole, context) pair of `input`.
Assignment defaultAssignment(const ExpansionInput &input);

inline constexpr const char *kTuneHeader = "# holetune v1";

/// Header, then `<holeName>;<context>;<value>` in lookup-index order.
std::string formatTuneFile(const Assignment &a, const ExpansionInput &input);

struct TuneFileContents {
  Assignment assignment;
  std::vector<std::string> warnings; // one per defaulted context hole
};

/// Throws MalformedTuneFile for syntax and type errors and UnknownHole for
/// names or contexts the program does not have. Missing pairs get defaults.
TuneFileContents parseTuneFile(const std::string &text,
                               const ExpansionInput &input);

void writeTuneFile(const Assignment &a, const ExpansionInput &input,
                   const std::string &path);
TuneFileContents readTuneFile(const std::string &path,
                              const ExpansionInput &input);

} // namespace holetune
