#include "holetune/tunefile.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace holetune {

Assignment defaultAssignment(const ExpansionInput &input) {
  Assignment a;
  for (const auto &h : input.holes)
    for (const auto &ctx : input.contexts.at(h.id - 1))
      a[{h.id, ctx}] = h.spec.defaultValue;
  return a;
}

std::string formatTuneFile(const Assignment &a, const ExpansionInput &input) {
  std::ostringstream out;
  out << kTuneHeader << '\n';
  for (const auto &h : input.holes)
    for (const auto &ctx : input.contexts.at(h.id - 1)) {
      auto it = a.find({h.id, ctx});
      std::int64_t v = it == a.end() ? h.spec.defaultValue : it->second;
      out << h.name << ';' << contextText(ctx) << ';'
          << holeValueText(h.spec, v) << '\n';
    }
  return out.str();
}

namespace {

std::vector<std::string> splitFields(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t semi = line.find(';', start);
    out.push_back(line.substr(start, semi - start));
    if (semi == std::string::npos)
      return out;
    start = semi + 1;
  }
}

std::string trim(const std::string &s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

} // namespace

TuneFileContents parseTuneFile(const std::string &text,
                               const ExpansionInput &input) {
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  auto where = [&] { return "tune file line " + std::to_string(lineNo) + ": "; };

  std::getline(in, line);
  ++lineNo;
  if (trim(line) != kTuneHeader)
    throw MalformedTuneFile(where() + "expected header '" +
                            std::string(kTuneHeader) + "'");

  TuneFileContents out;
  while (std::getline(in, line)) {
    ++lineNo;
    line = trim(line);
    if (line.empty() || line[0] == '#')
      continue;
    auto fields = splitFields(line);
    if (fields.size() != 3)
      throw MalformedTuneFile(where() + "expected <hole>;<context>;<value>");
    const BaseHole *hole = nullptr;
    for (const auto &h : input.holes)
      if (h.name == fields[0])
        hole = &h;
    if (!hole)
      throw UnknownHole(where() + "unknown hole '" + fields[0] + "'");
    ContextString ctx = parseContextText(fields[1]);
    if (!input.contexts.at(hole->id - 1).count(ctx))
      throw UnknownHole(where() + "hole '" + fields[0] +
                        "' has no context '" + fields[1] + "'");

    std::int64_t v = 0;
    const std::string &text = fields[2];
    if (hole->spec.kind == HoleKind::Boolean) {
      if (text == "true")
        v = 1;
      else if (text != "false")
        throw MalformedTuneFile(where() + "expected true or false, got '" +
                                text + "'");
    } else {
      auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || end != text.data() + text.size())
        throw MalformedTuneFile(where() + "expected an integer, got '" + text +
                                "'");
    }
    if (!out.assignment.emplace(ContextHole{hole->id, ctx}, v).second)
      throw MalformedTuneFile(where() + "duplicate entry for " + fields[0] +
                              ";" + fields[1]);
  }

  for (const auto &h : input.holes)
    for (const auto &ctx : input.contexts.at(h.id - 1))
      if (out.assignment.emplace(ContextHole{h.id, ctx}, h.spec.defaultValue)
              .second)
        out.warnings.push_back("tune file has no value for " + h.name + ";" +
                               contextText(ctx) + ", using default " +
                               holeValueText(h.spec, h.spec.defaultValue));
  return out;
}

void writeTuneFile(const Assignment &a, const ExpansionInput &input,
                   const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write tune file '" + path + "'");
  out << formatTuneFile(a, input);
  if (!out)
    throw Error("cannot write tune file '" + path + "'");
}

TuneFileContents readTuneFile(const std::string &path,
                              const ExpansionInput &input) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot read tune file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parseTuneFile(text.str(), input);
}

} // namespace holetune
