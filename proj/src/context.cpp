#include "holetune/context.hpp"

#include <map>

namespace holetune {

std::string contextText(const ContextString &s) {
  if (s.empty())
    return "-";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i)
      out += '.';
    out += s[i];
  }
  return out;
}

ContextString parseContextText(const std::string &text) {
  if (text == "-")
    return {};
  if (text.empty())
    throw Error("empty context string (use '-' for the empty context)");
  ContextString out;
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = text.find('.', start);
    std::string label = text.substr(start, dot - start);
    if (label.empty())
      throw Error("empty label in context string '" + text + "'");
    out.push_back(std::move(label));
    if (dot == std::string::npos)
      return out;
    start = dot + 1;
  }
}

namespace {

void dfs(const CallGraph &g, const std::string &v, ContextString &rev,
         std::set<std::string> &visited, int d, std::set<ContextString> &out) {
  auto emit = [&] { out.insert(ContextString(rev.rbegin(), rev.rend())); };
  auto in = g.incomingEdges(v);
  if (d == 0 || in.empty() || visited.count(v)) {
    emit();
    return;
  }
  visited.insert(v);
  for (const CallEdge *e : in) {
    if (e->sentinel) {
      emit();
      continue;
    }
    rev.push_back(e->label);
    dfs(g, e->from, rev, visited, d - 1, out);
    rev.pop_back();
  }
  visited.erase(v);
  if (g.isEntry(v))
    emit();
}

} // namespace

std::set<ContextString> contextStringsAt(const CallGraph &g,
                                         const std::string &vertex, int depth) {
  std::set<ContextString> out;
  ContextString rev;
  std::set<std::string> visited;
  dfs(g, vertex, rev, visited, depth, out);
  return out;
}

std::set<ContextString> contextStrings(const CallGraph &g, int holeId) {
  const GraphHole &h = g.hole(holeId);
  return contextStringsAt(g, h.home, h.depth);
}

ContextString suffix(const ContextString &s, int d) {
  if (d < 0 || static_cast<std::size_t>(d) >= s.size())
    return s;
  return ContextString(s.end() - d, s.end());
}

ContextString canonicalize(const ContextString &s, int d, std::optional<int> r) {
  if (!r)
    return suffix(s, d);
  std::map<std::string, int> seen;
  ContextString kept;
  for (auto it = s.rbegin(); it != s.rend(); ++it)
    if (++seen[*it] <= *r)
      kept.push_back(*it);
  return suffix(ContextString(kept.rbegin(), kept.rend()), d);
}

} // namespace holetune
