#include "holetune/cli.hpp"

#include "holetune/parser.hpp"
#include "holetune/pipeline.hpp"
#include "holetune/printer.hpp"
#include "holetune/tuner.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace holetune {

RunOutcome runDefault(const Program &program,
                      const std::vector<std::int64_t> &args, CostMode mode) {
  EvalOptions opt;
  opt.mode = mode;
  opt.args = args;
  EvalResult r = evaluate(defaultize(program), opt);
  return {r.value, r.cost, r.stats, {}};
}

RunOutcome runTuned(const ProgramModel &model, const std::string &tuneFile,
                    const std::vector<std::int64_t> &args, CostMode mode,
                    int threads) {
  ExpansionInput input = model.expansionInput();
  TuneFileContents tf = readTuneFile(tuneFile, input);
  EvalOptions opt;
  opt.mode = mode;
  opt.args = args;
  EvalResult r = evaluate(compileTuned(model, tf.assignment, threads), opt);
  return {r.value, r.cost, r.stats, std::move(tf.warnings)};
}

namespace {

std::string readText(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void writeText(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  out << text;
  if (!out)
    throw Error("cannot write '" + path + "'");
}

std::vector<std::int64_t> parseInts(const std::string &text) {
  std::vector<std::int64_t> out;
  std::string s = text;
  for (char &c : s)
    if (c == ',')
      c = ' ';
  std::istringstream in(s);
  std::string word;
  while (in >> word) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(word, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != word.size())
      throw Error("expected an integer, got '" + word + "'");
    out.push_back(v);
  }
  return out;
}

void printRun(const RunOutcome &r, std::ostream &out, std::ostream &err) {
  for (const auto &w : r.warnings)
    err << "warning: " << w << "\n";
  out << "value: " << valueToString(r.value) << "\n";
  out << "cost: " << r.cost.total << " " << costModeName(r.cost.mode) << "\n";
}

std::string contextsText(const ProgramModel &m) {
  std::ostringstream out;
  for (const auto &h : m.holes) {
    out << h.name << " home=" << h.home << " depth=" << h.depth() << "\n";
    for (const auto &ctx : m.contexts.at(h.id - 1))
      out << "  " << contextText(ctx) << "\n";
  }
  return out.str();
}

struct Config {
  std::string program;
  std::string tuned;
  std::vector<std::string> args;
  std::vector<std::string> inputs;
  std::string mode = "steps";
  std::optional<std::size_t> iters;
  std::optional<double> timeout;
  std::optional<std::int64_t> step;
  int filterRuns = 0;
  double filterThreshold = 0;
  bool test = false;
  bool noTail = false;
  std::string emit;
  int threads = 1;
  std::string output;
  std::string report;
  std::uint64_t seed = 1;
};

int cmdRun(const Config &c, std::ostream &out, std::ostream &err) {
  Program program = parseFile(c.program);
  std::vector<std::int64_t> args;
  for (const auto &a : c.args) {
    auto v = parseInts(a);
    args.insert(args.end(), v.begin(), v.end());
  }
  CostMode mode = parseCostMode(c.mode);
  ProgramModel m = analyzeProgram(std::move(program));
  if (c.tuned.empty())
    printRun(runDefault(m.program, args, mode), out, err);
  else
    printRun(runTuned(m, c.tuned, args, mode, c.threads), out, err);
  return kExitOk;
}

int cmdTune(const Config &c, std::ostream &out, std::ostream &err) {
  ProgramModel m = analyzeProgram(parseFile(c.program));
  std::vector<std::vector<std::int64_t>> inputs;
  for (const auto &i : c.inputs)
    inputs.push_back(parseInts(i));
  if (inputs.empty()) {
    std::vector<std::int64_t> args;
    for (const auto &a : c.args) {
      auto v = parseInts(a);
      args.insert(args.end(), v.begin(), v.end());
    }
    inputs.push_back(args);
  }
  TuneOptions opt;
  opt.mode = parseCostMode(c.mode);
  opt.maxRows = c.iters;
  opt.timeoutSeconds = c.timeout;
  opt.step = c.step;
  opt.filterRuns = c.filterRuns;
  opt.filterThreshold = c.filterThreshold;
  opt.test = c.test;
  opt.tailForm = !c.noTail;
  opt.threads = c.threads;
  opt.seed = c.seed;
  std::string tunePath = c.output.empty() ? c.program + ".tune" : c.output;
  if (std::filesystem::weakly_canonical(tunePath) ==
      std::filesystem::weakly_canonical(c.program))
    throw Error("refusing to overwrite the program source with the tune file");
  TuneReport report = tune(m, inputs, opt);

  ExpansionInput input = m.expansionInput();
  writeTuneFile(report.assignment, input, tunePath);
  std::string reportPath = c.report.empty() ? tunePath + ".report" : c.report;
  writeText(reportPath, report.keyValues());
  out << report.text(input);
  out << "tune file: " << tunePath << "\n";
  out << "report: " << reportPath << "\n";
  (void)err;
  return kExitOk;
}

int cmdAnalyze(const Config &c, std::ostream &out, std::ostream &) {
  ProgramModel m = analyzeProgram(parseFile(c.program));
  std::string text;
  const std::string file = m.program.file();
  if (c.emit == "callgraph") {
    text = m.graph.toDot();
  } else if (c.emit == "contexts") {
    text = contextsText(m);
  } else if (c.emit == "depgraph") {
    DependencyAnalysis a = buildDependencyGraph(m);
    text = a.graph.toDot(a.points, file);
  } else if (c.emit == "colored") {
    ExpansionInput input = m.expansionInput();
    CellPlan plan;
    plan.threads = c.threads;
    plan.vertices = holeCellVertices(m.graph, m.colors, input);
    Program colored = insertColorUpdates(m.program, m.graph, m.colors, plan);
    auto [expanded, index] =
        contextExpansion(colored, m.graph, m.colors, plan, input);
    std::ostringstream s;
    for (std::size_t k = 0; k < index.size(); ++k) {
      const auto &e = index.entries()[k];
      s << "-- holeValue " << k << ": " << m.hole(e.holeId).name << ";"
        << contextText(e.context) << "\n";
    }
    s << prettyPrint(expanded) << "\n";
    text = s.str();
  } else if (c.emit == "executable") {
    TuningBuild b = buildTuningExecutable(m, {!c.noTail, c.threads});
    text = serializeExecutable(b.executable);
  } else {
    throw Error("unknown --emit target '" + c.emit + "'");
  }
  if (c.output.empty())
    out << text;
  else
    writeText(c.output, text);
  return kExitOk;
}

int cmdExec(const Config &c, std::ostream &out, std::ostream &err) {
  TuningExecutable exe = deserializeExecutable(readText(c.program));
  std::vector<std::int64_t> args;
  for (const auto &a : c.args) {
    auto v = parseInts(a);
    args.insert(args.end(), v.begin(), v.end());
  }
  std::vector<std::string> warnings;
  ExecRun r = runExecutableFromEnvironment(exe, args, parseCostMode(c.mode),
                                           c.test, warnings);
  RunOutcome o{r.value, {r.observation.total, parseCostMode(c.mode)}, r.stats,
               warnings};
  printRun(o, out, err);
  return kExitOk;
}

} // namespace

int runCli(const std::vector<std::string> &argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Context-sensitive auto-tuning of holes in functional programs",
               "holetune"};
  app.require_subcommand(1);
  Config c;

  auto addMode = [&](CLI::App *sub) {
    sub->add_option("--mode", c.mode, "Cost measure")
        ->check(CLI::IsMember({"steps", "wallclock"}));
  };
  auto addArgs = [&](CLI::App *sub) {
    sub->add_option("--args", c.args, "Integer program arguments");
  };

  auto *run = app.add_subcommand("run", "Run with default or tuned values");
  run->add_option("program", c.program)->required();
  run->add_option("--tuned", c.tuned, "Tune file to bake in");
  run->add_option("--threads", c.threads)->check(CLI::PositiveNumber);
  addArgs(run);
  addMode(run);

  auto *tuneCmd = app.add_subcommand("tune", "Tune the holes of a program");
  tuneCmd->add_option("program", c.program)->required();
  tuneCmd->add_option("--input", c.inputs,
                      "One input datum (integers); repeat for several");
  addArgs(tuneCmd);
  addMode(tuneCmd);
  tuneCmd->add_option("--iters", c.iters, "Maximum rows to execute");
  tuneCmd->add_option("--timeout", c.timeout, "Seconds before stopping")
      ->check(CLI::NonNegativeNumber);
  tuneCmd->add_option("--step", c.step, "Step for integer-range holes")
      ->check(CLI::PositiveNumber);
  tuneCmd->add_option("--filter-runs", c.filterRuns,
                      "Random runs for measuring-point filtering");
  tuneCmd->add_option("--filter-threshold", c.filterThreshold,
                      "Drop points with a lower mean cost");
  tuneCmd->add_flag("--test", c.test, "Rows failing an assert are infeasible");
  tuneCmd->add_flag("--no-tail-instrument", c.noTail,
                    "Wrap tail-recursive points like any other");
  tuneCmd->add_option("--threads", c.threads)->check(CLI::PositiveNumber);
  tuneCmd->add_option("-o,--output", c.output, "Tune file path");
  tuneCmd->add_option("--report", c.report, "Key-value report path");
  tuneCmd->add_option("--seed", c.seed, "Seed for filtering runs");

  auto *analyze = app.add_subcommand("analyze", "Print analysis artifacts");
  analyze->add_option("program", c.program)->required();
  analyze->add_option("--emit", c.emit)
      ->required()
      ->check(CLI::IsMember(
          {"callgraph", "contexts", "depgraph", "colored", "executable"}));
  analyze->add_flag("--no-tail-instrument", c.noTail);
  analyze->add_option("--threads", c.threads)->check(CLI::PositiveNumber);
  analyze->add_option("-o,--output", c.output);

  auto *exec = app.add_subcommand(
      "exec", "Run a tuning executable (HOLETUNE_TUNE in, HOLETUNE_LOG out)");
  exec->add_option("executable", c.program)->required();
  addArgs(exec);
  addMode(exec);
  exec->add_flag("--test", c.test, "Check asserts");

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  if (!reversed.empty())
    reversed.pop_back(); // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUser;
  }

  try {
    if (run->parsed())
      return cmdRun(c, out, err);
    if (tuneCmd->parsed())
      return cmdTune(c, out, err);
    if (analyze->parsed())
      return cmdAnalyze(c, out, err);
    return cmdExec(c, out, err);
  } catch (const SyntaxError &e) {
    err << "error: " << c.program << ":" << e.what() << "\n";
    return kExitUser;
  } catch (const AssertFailure &e) {
    err << "assertion failed: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const RuntimeError &e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const RowFailed &e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const std::exception &e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

} // namespace holetune
