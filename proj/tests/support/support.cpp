#include "support.hpp"

#include "holetune/cli.hpp"
#include "holetune/parser.hpp"
#include "holetune/pipeline.hpp"
#include "holetune/printer.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace holetune::testing {

std::string programPath(const std::string &name) {
  return std::string(HOLETUNE_PROGRAMS_DIR) + "/" + name + ".hl";
}

ProgramModel loadModel(const std::string &name) {
  return analyzeProgram(parseFile(programPath(name)));
}

ProgramModel modelFromSource(const std::string &source,
                             const std::string &file) {
  return analyzeProgram(parse(source, file));
}

CallGraph callsGraph(int depth) {
  CallGraph g;
  for (const char *v : {"A", "B", "C", "D"})
    g.addVertex(v);
  g.addEntry("A");
  g.addEdge({"A", "C", "a"});
  g.addEdge({"A", "B", "b"});
  g.addEdge({"C", "D", "c"});
  g.addEdge({"C", "D", "d"});
  g.addEdge({"C", "C", "e"});
  g.addEdge({"B", "C", "f"});
  g.addHole({1, "h", depth, "D"});
  return g;
}

std::vector<ContextString> callStrings(const CallGraph &g, const std::string &to,
                                       std::size_t maxLen) {
  std::vector<ContextString> out;
  ContextString cur;
  std::function<void(const std::string &)> walk = [&](const std::string &v) {
    if (v == to && !cur.empty())
      out.push_back(cur);
    if (cur.size() == maxLen)
      return;
    for (const auto &e : g.edges()) {
      if (e.from != v || e.sentinel)
        continue;
      cur.push_back(e.label);
      walk(e.to);
      cur.pop_back();
    }
  };
  for (const auto &s : g.entries()) {
    if (s == to)
      out.push_back({});
    walk(s);
  }
  return out;
}

namespace {

DependencyGraph bipartite(int holes,
                          const std::vector<std::vector<std::size_t>> &points) {
  DependencyGraph dg;
  for (int h = 1; h <= holes; ++h)
    dg.holes.push_back({h, {}});
  for (std::size_t p = 0; p < points.size(); ++p) {
    dg.points.push_back({static_cast<int>(p + 1), p, {}});
    for (std::size_t h : points[p])
      dg.edges.emplace_back(h, p);
  }
  return dg;
}

} // namespace

DependencyGraph fullyDependentGraph(int n) {
  std::vector<std::size_t> all;
  for (int h = 0; h < n; ++h)
    all.push_back(static_cast<std::size_t>(h));
  return bipartite(n, {all});
}

DependencyGraph independentGraph(int n) {
  std::vector<std::vector<std::size_t>> points;
  for (int h = 0; h < n; ++h)
    points.push_back({static_cast<std::size_t>(h)});
  return bipartite(n, points);
}

DependencyGraph partialGraph() { return bipartite(4, {{0, 1}, {1, 2}, {3}}); }

Domains booleanDomains(std::size_t n) { return Domains(n, {0, 1}); }

CallGraph randomCallGraph(Rng &rng, const RandomGraphOptions &options) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  int n = pick(1, options.maxVertices);
  CallGraph g;
  auto name = [](int i) { return "v" + std::to_string(i); };
  for (int i = 0; i < n; ++i)
    g.addVertex(name(i));
  g.addEntry(name(0));
  std::map<int, int> perCaller;
  auto add = [&](int from, int to) {
    std::string label =
        name(from) + "/" + std::to_string(++perCaller[from]);
    g.addEdge({name(from), name(to), label});
  };
  // A spanning tree from v0 keeps every vertex reachable.
  for (int i = 1; i < n; ++i)
    add(pick(0, i - 1), i);
  int extra = pick(0, std::max(0, options.maxEdges - (n - 1)));
  for (int k = 0; k < extra; ++k) {
    int from = pick(0, n - 1);
    int to = pick(0, n - 1);
    if (options.acyclic) {
      if (from == to)
        continue;
      if (from > to)
        std::swap(from, to);
    }
    add(from, to);
  }
  if (options.sentinels) {
    std::set<std::string> exported;
    for (int i = 1; i < n; ++i)
      if (pick(0, 3) == 0)
        exported.insert(name(i));
    return addSentinels(g, exported);
  }
  return g;
}

std::vector<std::string> randomWalk(const CallGraph &g, Rng &rng,
                                    std::size_t maxSteps) {
  auto choose = [&](const std::vector<const CallEdge *> &es) {
    return es[std::uniform_int_distribution<std::size_t>(0, es.size() - 1)(rng)];
  };
  std::vector<const CallEdge *> starts, sentinels;
  for (const auto &e : g.edges()) {
    if (g.isEntry(e.from))
      starts.push_back(&e);
    if (e.sentinel)
      sentinels.push_back(&e);
  }
  std::vector<std::string> walk;
  if (starts.empty())
    return walk;
  std::size_t steps =
      std::uniform_int_distribution<std::size_t>(1, maxSteps)(rng);
  const CallEdge *e = choose(starts);
  for (;;) {
    walk.push_back(e->label);
    if (walk.size() == steps)
      break;
    std::vector<const CallEdge *> next;
    for (const auto &o : g.edges())
      if (o.from == e->to && !o.sentinel)
        next.push_back(&o);
    bool restart = !sentinels.empty() &&
                   std::uniform_int_distribution<int>(0, 9)(rng) == 0;
    if (restart)
      e = choose(sentinels);
    else if (!next.empty())
      e = choose(next);
    else
      break;
  }
  return walk;
}

ContextString historyContext(const CallGraph &,
                             const std::vector<const CallEdge *> &history,
                             const std::string &home, int depth) {
  std::map<std::string, const CallEdge *> lastInto;
  for (const CallEdge *e : history)
    lastInto[e->to] = e;
  std::set<std::string> visited{home};
  std::string cur = home;
  ContextString rev;
  while (static_cast<int>(rev.size()) < depth) {
    auto it = lastInto.find(cur);
    if (it == lastInto.end() || it->second->sentinel)
      break;
    rev.push_back(it->second->label);
    if (!visited.insert(it->second->from).second)
      break;
    cur = it->second->from;
  }
  return ContextString(rev.rbegin(), rev.rend());
}

ContextString historyContext(const CallGraph &g,
                             const std::vector<std::string> &walk,
                             const std::string &home, int depth) {
  std::vector<const CallEdge *> history;
  for (const auto &l : walk)
    history.push_back(g.edgeByLabel(l));
  return historyContext(g, history, home, depth);
}

std::set<ContextString> allPaths(const CallGraph &g, const std::string &to) {
  std::set<ContextString> out;
  ContextString rev;
  std::function<void(const std::string &)> back = [&](const std::string &v) {
    if (g.isEntry(v))
      out.insert(ContextString(rev.rbegin(), rev.rend()));
    for (const CallEdge *e : g.incomingEdges(v)) {
      rev.push_back(e->label);
      back(e->from);
      rev.pop_back();
    }
  };
  back(to);
  return out;
}

namespace {

class ProgramGen {
public:
  ProgramGen(Rng &rng, const RandomProgramOptions &options)
      : rng_(rng), opt_(options) {}

  std::string run() {
    std::ostringstream out;
    int functions = pick(1, opt_.maxFunctions);
    for (int f = 0; f < functions; ++f) {
      int shape = opt_.loops ? pick(0, 4) : 0;
      if (shape == 3 && !callable_.empty())
        out << tailLoop();
      else if (shape == 4 && !callable_.empty())
        out << nonTailRecursion();
      else
        out << function(f == 0);
    }
    vars_ = {"a"};
    holeVars_.clear();
    out << "let a = argInt 0 in\n";
    out << holeDecls(false);
    out << expr(3) << "\n";
    return out.str();
  }

private:
  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool chance(int percent) { return pick(1, 100) <= percent; }
  std::string fresh(const char *prefix) {
    return prefix + std::to_string(++fresh_);
  }

  std::string holeDecls(bool force) {
    std::string out;
    while (holes_ < opt_.maxHoles && (force || chance(35))) {
      force = false;
      std::string h = "h" + std::to_string(++holes_);
      out += "  let " + h + " = hole (Boolean {default = " +
             (chance(50) ? "true" : "false") +
             ", depth = " + std::to_string(pick(0, opt_.maxHoleDepth)) +
             "}) in\n";
      holeVars_.push_back(h);
    }
    return out;
  }

  std::string function(bool forceHole) {
    std::string name = fresh("f");
    vars_ = {"x"};
    holeVars_.clear();
    std::string out = "let " + name + " = lam x.\n" + holeDecls(forceHole);
    out += "  " + expr(3) + "\nin\n";
    callable_.push_back(name);
    return out;
  }

  std::string tailLoop() {
    std::string name = fresh("loop");
    vars_ = {"i", "acc"};
    holeVars_.clear();
    std::string out = "recursive let " + name + " = lam i. lam acc.\n" +
                      holeDecls(false);
    out += "  match i with 0 then acc\n  else " + name +
           " (subi i 1) (addi acc " + expr(2) + ")\nin\n";
    loops_.push_back(name);
    return out;
  }

  std::string nonTailRecursion() {
    std::string name = fresh("rec");
    vars_ = {"n"};
    holeVars_.clear();
    std::string out = "recursive let " + name + " = lam n.\n" + holeDecls(false);
    out += "  match n with 0 then 1\n  else addi " + expr(2) + " (" + name +
           " (subi n 1))\nin\n";
    recs_.push_back(name);
    return out;
  }

  template <typename T> const T &any(const std::vector<T> &v) {
    return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
  }

  std::string atom() {
    if (chance(50))
      return any(vars_);
    return std::to_string(pick(0, 5));
  }

  std::string bounded(int depth, int mod) {
    return "(modi " + expr(depth) + " " + std::to_string(mod) + ")";
  }

  std::string expr(int depth) {
    if (depth <= 0)
      return atom();
    for (;;) {
      switch (pick(0, 11)) {
      case 0:
        return atom();
      case 1:
        return "(addi " + expr(depth - 1) + " " + expr(depth - 1) + ")";
      case 2:
      case 3:
        if (holeVars_.empty())
          continue;
        return "(if " + any(holeVars_) + " then " + expr(depth - 1) +
               " else " + expr(depth - 1) + ")";
      case 4:
        return "(if lti " + expr(depth - 1) + " " + expr(depth - 1) +
               " then " + expr(depth - 1) + " else " + expr(depth - 1) + ")";
      case 5:
        if (callable_.empty())
          continue;
        return "(" + any(callable_) + " " + expr(depth - 1) + ")";
      case 6:
        if (loops_.empty())
          continue;
        return "(" + any(loops_) + " " + bounded(depth - 1, 5) + " " +
               expr(depth - 1) + ")";
      case 7:
        if (recs_.empty())
          continue;
        return "(" + any(recs_) + " " + bounded(depth - 1, 4) + ")";
      case 8:
        return std::string("(length (") +
               (chance(50) ? "createList" : "createRope") + " " +
               bounded(depth - 1, 6) + " (lam i. addi i " + atom() + ")))";
      case 9: {
        std::string v = fresh("v");
        std::string rhs = expr(depth - 1);
        vars_.push_back(v);
        std::string body = expr(depth - 1);
        vars_.pop_back();
        return "(let " + v + " = " + rhs + " in " + body + ")";
      }
      case 10:
        return "(match " + expr(depth - 1) + " with 0 then " +
               expr(depth - 1) + " else " + expr(depth - 1) + ")";
      case 11: {
        std::string s = fresh("s");
        std::string rhs = std::string(chance(50) ? "createList" : "createRope") +
                          " (addi " + bounded(depth - 1, 5) +
                          " 1) (lam i. muli i 3)";
        return "(let " + s + " = " + rhs + " in get " + s + " (modi " +
               expr(depth - 1) + " (length " + s + ")))";
      }
      }
    }
  }

  Rng &rng_;
  RandomProgramOptions opt_;
  int holes_ = 0;
  int fresh_ = 0;
  std::vector<std::string> vars_;
  std::vector<std::string> holeVars_;
  std::vector<std::string> callable_;
  std::vector<std::string> loops_;
  std::vector<std::string> recs_;
};

} // namespace

std::string randomProgram(Rng &rng, const RandomProgramOptions &options) {
  return ProgramGen(rng, options).run();
}

EvalResult evaluateByHistory(const ProgramModel &model, const Assignment &a,
                             const std::vector<std::int64_t> &args,
                             CostMode mode) {
  std::vector<const CallEdge *> history;
  std::map<NodeId, const BaseHole *> holeAt;
  for (const auto &h : model.holes)
    holeAt[h.node] = &h;
  EvalOptions opt;
  opt.mode = mode;
  opt.args = args;
  opt.onCall = [&](const Expr &app, const Closure &fn) {
    int f = model.functions->functionOfLambda(fn.lambda->id);
    if (f < 0)
      return;
    const std::string &to = model.functions->at(static_cast<std::size_t>(f)).name;
    for (const CallEdge *e : model.graph.edgesAtSite(app.id))
      if (e->to == to)
        history.push_back(e);
  };
  opt.holeResolver = [&](const Expr &node) -> Value {
    const BaseHole &h = *holeAt.at(node.id);
    ContextString ctx = historyContext(model.graph, history, h.home, h.depth());
    auto it = a.find({h.id, ctx});
    if (it == a.end())
      throw Error("no value for " + h.name + ";" + contextText(ctx));
    if (h.spec.kind == HoleKind::Boolean)
      return it->second != 0;
    return it->second;
  };
  return evaluate(model.program, opt);
}

std::size_t assignmentCount(const ExpansionInput &input, std::size_t limit) {
  std::size_t n = 1;
  for (const auto &h : input.holes)
    for (std::size_t k = 0; k < input.contexts.at(h.id - 1).size(); ++k) {
      n *= holeDomain(h.spec).size();
      if (n > limit)
        return limit + 1;
    }
  return n;
}

std::vector<Assignment> allAssignments(const ExpansionInput &input) {
  std::vector<Assignment> out{{}};
  for (const auto &h : input.holes)
    for (const auto &ctx : input.contexts.at(h.id - 1)) {
      std::vector<Assignment> next;
      for (const auto &a : out)
        for (std::int64_t v : holeDomain(h.spec)) {
          Assignment b = a;
          b[{h.id, ctx}] = v;
          next.push_back(std::move(b));
        }
      out = std::move(next);
    }
  return out;
}

Assignment randomAssignment(const ExpansionInput &input, Rng &rng) {
  Assignment a;
  for (const auto &h : input.holes) {
    auto dom = holeDomain(h.spec);
    for (const auto &ctx : input.contexts.at(h.id - 1))
      a[{h.id, ctx}] = dom[std::uniform_int_distribution<std::size_t>(
          0, dom.size() - 1)(rng)];
  }
  return a;
}

Assignment withHole(Assignment base, int id, std::int64_t v) {
  for (auto &[h, value] : base)
    if (h.holeId == id)
      value = v;
  return base;
}

std::vector<std::string>
flipViolations(const ProgramModel &model, const TuningBuild &build,
               const std::vector<Assignment> &samples,
               const std::vector<std::vector<std::int64_t>> &inputs) {
  const DependencyGraph &dg = build.analysis.graph;
  std::map<int, std::size_t> pointIndex;
  for (std::size_t p = 0; p < dg.points.size(); ++p)
    pointIndex[dg.points[p].id] = p;
  auto linked = [&](int holeId, int pointId) {
    for (const auto &[h, p] : dg.edges)
      if (dg.holes[h].holeId == holeId && dg.points[p].id == pointId)
        return true;
    return false;
  };
  std::vector<std::string> out;
  for (const Assignment &a : samples)
    for (const auto &h : model.holes) {
      if (h.spec.kind != HoleKind::Boolean)
        continue;
      Assignment flipped = a;
      for (auto &[ch, v] : flipped)
        if (ch.holeId == h.id)
          v = 1 - v;
      for (const auto &args : inputs) {
        auto x = runExecutable(build.executable, a, args, CostMode::Steps);
        auto y = runExecutable(build.executable, flipped, args, CostMode::Steps);
        for (const auto &[id, i] : pointIndex)
          if (x.observation.cost(id) != y.observation.cost(id) &&
              !linked(h.id, id))
            out.push_back("flipping " + h.name + " changes m" +
                          std::to_string(id) + " (" +
                          std::to_string(x.observation.cost(id)) + " vs " +
                          std::to_string(y.observation.cost(id)) + ")");
      }
    }
  return out;
}

namespace {

ExprPtr strip(const Expr &e) {
  if (e.kind == ExprKind::Independent)
    return strip(e.child(0));
  auto copy = cloneNode(e);
  for (const auto &k : e.kids)
    copy->kids.push_back(strip(*k));
  return copy;
}

} // namespace

Program stripIndependent(const Program &program) {
  return parse(prettyPrint(Program(strip(program.root()), false)),
               program.file());
}

EvalResult runCompiled(const ProgramModel &model, const Assignment &a,
                       const std::vector<std::int64_t> &args) {
  EvalOptions opt;
  opt.args = args;
  return evaluate(compileTuned(model, a), opt);
}

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "holetune");
  std::ostringstream out, err;
  CliResult r;
  r.code = runCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

CliResult cliProcess(const std::string &args) {
  std::string cmd = std::string(HOLETUNE_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE *p = ::popen(cmd.c_str(), "r");
  if (!p)
    throw Error("cannot start " + cmd);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0)
    r.out.append(buf, n);
  int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string tempPath(const std::string &name) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("holetune-test-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / (std::to_string(++counter) + "-" + name)).string();
}

} // namespace holetune::testing
