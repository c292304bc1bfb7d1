#include "holetune/pipeline.hpp"

#include "holetune/parser.hpp"
#include "holetune/printer.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace holetune {

TuningBuild buildTuningExecutable(const ProgramModel &model,
                                  const BuildOptions &options) {
  TuningBuild out;
  out.analysis = buildDependencyGraph(model);
  ExpansionInput input = model.expansionInput();

  CellPlan plan;
  plan.threads = options.threads;
  plan.vertices = holeCellVertices(model.graph, model.colors, input);
  auto pointCells = pointCellVertices(model, out.analysis);
  plan.vertices.insert(pointCells.begin(), pointCells.end());

  // Instrumentation runs on the source so that a point's wrapper also encloses
  // the argument bindings and cell writes the coloring adds around the call.
  InstrumentResult instr =
      instrumentProgram(model, out.analysis, plan, {options.tailForm});
  out.warnings = std::move(instr.warnings);
  Program colored =
      insertColorUpdates(instr.program, model.graph, model.colors, plan);
  auto [expanded, index] =
      contextExpansion(colored, model.graph, model.colors, plan, input);

  TuningExecutable &exe = out.executable;
  exe.program = std::move(expanded);
  exe.input = std::move(input);
  exe.threads = options.threads;
  exe.pointCount = out.analysis.graph.points.size();
  const std::string file =
      model.program.file().empty() ? "<input>" : model.program.file();
  for (const auto &inst : out.analysis.graph.points)
    exe.pointNames.push_back(
        "m" + std::to_string(inst.id) + "@" + file + ":" +
        std::to_string(out.analysis.points[inst.point].loc.line) + "[" +
        contextText(inst.context) + "]");
  return out;
}

std::string serializeExecutable(const TuningExecutable &exe) {
  std::ostringstream out;
  out << kExecutableHeader << '\n';
  out << "-- threads " << exe.threads << '\n';
  out << "-- points " << exe.pointCount << '\n';
  for (const auto &name : exe.pointNames)
    out << "-- point " << name << '\n';
  for (const auto &h : exe.input.holes) {
    const HoleSpec &s = h.spec;
    out << "-- hole " << h.id << ' '
        << (s.kind == HoleKind::Boolean ? "bool" : "int") << ' '
        << s.defaultValue << ' ' << s.min << ' ' << s.max << ' ' << s.step
        << ' ' << s.depth << ' ' << h.home << ' ' << h.name << '\n';
    for (const auto &ctx : exe.input.contexts.at(h.id - 1))
      out << "-- context " << h.id << ' ' << contextText(ctx) << '\n';
  }
  out << "-- program\n";
  out << prettyPrint(exe.program) << '\n';
  return out.str();
}

TuningExecutable deserializeExecutable(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kExecutableHeader)
    throw Error("not a holetune executable (missing '" +
                std::string(kExecutableHeader) + "' header)");
  TuningExecutable exe;
  std::size_t lineNo = 1;
  auto bad = [&](const std::string &why) {
    return Error("executable line " + std::to_string(lineNo) + ": " + why);
  };
  bool sawProgram = false;
  while (!sawProgram && std::getline(in, line)) {
    ++lineNo;
    std::istringstream f(line);
    std::string dash, tag;
    f >> dash >> tag;
    if (dash != "--")
      throw bad("expected metadata");
    if (tag == "threads") {
      f >> exe.threads;
    } else if (tag == "points") {
      f >> exe.pointCount;
    } else if (tag == "point") {
      std::string name;
      f >> name;
      exe.pointNames.push_back(name);
    } else if (tag == "hole") {
      BaseHole h;
      std::string kind;
      f >> h.id >> kind >> h.spec.defaultValue >> h.spec.min >> h.spec.max >>
          h.spec.step >> h.spec.depth >> h.home >> h.name;
      if (!f || (kind != "bool" && kind != "int") ||
          h.id != static_cast<int>(exe.input.holes.size()) + 1)
        throw bad("malformed hole record");
      h.spec.kind = kind == "bool" ? HoleKind::Boolean : HoleKind::IntRange;
      exe.input.holes.push_back(h);
      exe.input.contexts.emplace_back();
      continue;
    } else if (tag == "context") {
      int id = 0;
      std::string ctx;
      f >> id >> ctx;
      if (!f || id < 1 || static_cast<std::size_t>(id) > exe.input.holes.size())
        throw bad("malformed context record");
      exe.input.contexts[id - 1].insert(parseContextText(ctx));
      continue;
    } else if (tag == "program") {
      sawProgram = true;
      continue;
    } else {
      throw bad("unknown record '" + tag + "'");
    }
    if (!f)
      throw bad("malformed " + tag + " record");
  }
  if (!sawProgram)
    throw Error("executable has no program section");
  std::ostringstream body;
  body << in.rdbuf();
  exe.program = Program(parseExpr(body.str()), false);
  return exe;
}

std::vector<Value> slotValues(const ExpansionInput &input, const Assignment &a) {
  LookupIndex index = makeLookupIndex(input);
  std::vector<Value> slots(index.size());
  for (const auto &entry : index.entries()) {
    const BaseHole &h = input.holes.at(entry.holeId - 1);
    auto it = a.find(entry);
    std::int64_t v = it == a.end() ? h.spec.defaultValue : it->second;
    Value value = h.spec.kind == HoleKind::Boolean ? Value(v != 0) : Value(v);
    slots[index.slot(entry.holeId, entry.context)] = value;
  }
  return slots;
}

ExecRun runExecutable(const TuningExecutable &exe, const Assignment &a,
                      const std::vector<std::int64_t> &args, CostMode mode,
                      bool checkAsserts) {
  EvalOptions opt;
  opt.mode = mode;
  opt.args = args;
  opt.slots = slotValues(exe.input, a);
  opt.pointCount = exe.pointCount;
  opt.checkAsserts = checkAsserts;
  EvalResult r = evaluate(exe.program, opt);
  return {r.value, observe(r.instrumentation, r.cost.total), r.stats};
}

ExecRun runExecutableFromEnvironment(const TuningExecutable &exe,
                                     const std::vector<std::int64_t> &args,
                                     CostMode mode, bool checkAsserts,
                                     std::vector<std::string> &warnings) {
  Assignment a = defaultAssignment(exe.input);
  if (const char *tune = std::getenv(kTuneEnv); tune && *tune) {
    auto contents = readTuneFile(tune, exe.input);
    a = std::move(contents.assignment);
    warnings.insert(warnings.end(), contents.warnings.begin(),
                    contents.warnings.end());
  }
  ExecRun run = runExecutable(exe, a, args, mode, checkAsserts);
  if (const char *log = std::getenv(kLogEnv); log && *log) {
    std::ofstream out(log);
    out << emitLog(run.observation);
    if (!out)
      throw Error(std::string("cannot write log '") + log + "'");
  }
  return run;
}

Program compileTuned(const ProgramModel &model, const Assignment &a,
                     int threads) {
  ExpansionInput input = model.expansionInput();
  CellPlan plan;
  plan.threads = threads;
  plan.vertices = holeCellVertices(model.graph, model.colors, input);
  Program colored =
      insertColorUpdates(model.program, model.graph, model.colors, plan);
  return expandHoles(colored, model.graph, model.colors, plan, input,
                     [&](const BaseHole &h, const ContextString &ctx) {
                       auto it = a.find({h.id, ctx});
                       std::int64_t v =
                           it == a.end() ? h.spec.defaultValue : it->second;
                       return h.spec.kind == HoleKind::Boolean
                                  ? build::boolLit(v != 0)
                                  : build::intLit(v);
                     });
}

} // namespace holetune
