#pragma once

#include "holetune/callgraph.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace holetune {

/// Labels in call order; the last label is the call into the hole's home.
using ContextString = std::vector<std::string>;

/// Labels joined by `.`; the empty string renders as `-`.
std::string contextText(const ContextString &s);
ContextString parseContextText(const std::string &text);

/// Backward depth-first enumeration from `vertex`: a branch stops when the
/// depth is exhausted, the vertex has no incoming edges, or the vertex was
/// already visited; entries also contribute the string collected so far.
/// Sentinel edges end a branch without contributing their label.
std::set<ContextString> contextStringsAt(const CallGraph &g,
                                         const std::string &vertex, int depth);

/// Context strings of base hole `holeId` under the coloring relation.
/// Throws UnknownHole.
std::set<ContextString> contextStrings(const CallGraph &g, int holeId);

/// The last `d` labels of `s`.
ContextString suffix(const ContextString &s, int d);

/// Keeps only the `r` rightmost occurrences of every label, then takes the
/// last `d` labels. Without `r` this is plain suffix_d.
ContextString canonicalize(const ContextString &s, int d,
                           std::optional<int> r = std::nullopt);

} // namespace holetune
