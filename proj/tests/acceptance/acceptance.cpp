// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "support.hpp"

#include "holetune/coloring.hpp"
#include "holetune/parser.hpp"
#include "holetune/pipeline.hpp"
#include "holetune/printer.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

using namespace holetune;
using namespace holetune::testing;

namespace {

/// Collects the first few mismatches of a criterion.
struct Check {
  std::vector<std::string> failures;
  std::size_t cases = 0;

  void expect(bool ok, const std::string &what) {
    ++cases;
    if (!ok && failures.size() < 5)
      failures.push_back(what);
    else if (!ok)
      failures.push_back("...");
  }
};

std::string text(const std::set<ContextString> &s) {
  std::string out = "{";
  for (const auto &c : s)
    out += (out.size() > 1 ? "," : "") + contextText(c);
  return out + "}";
}

ContextString ctx(const std::string &dotted) { return parseContextText(dotted); }

std::set<ContextString> ctxSet(std::initializer_list<const char *> items) {
  std::set<ContextString> out;
  for (const char *i : items)
    out.insert(ctx(i));
  return out;
}

/// Example strings written with single letters (ac means a then c).
std::set<ContextString> letters(std::initializer_list<const char *> items) {
  std::set<ContextString> out;
  for (std::string s : items) {
    ContextString c;
    for (char ch : s)
      c.push_back(std::string(1, ch));
    out.insert(c);
  }
  return out;
}

std::string lettersText(const std::set<ContextString> &s) {
  std::string out = "{";
  for (const auto &c : s) {
    if (out.size() > 1)
      out += ",";
    for (const auto &l : c)
      out += l;
  }
  return out + "}";
}

void criterion1(Check &c) {
  CallGraph g = callsGraph(3);
  auto got = contextStrings(g, 1);
  auto want = letters({"ac", "ec", "ad", "ed", "bfc", "bfd"});
  c.expect(got == want, "coloring relation gave " + lettersText(got));

  auto strings = callStrings(g, "D", 9);
  std::set<ContextString> d3, r1;
  for (const auto &s : strings) {
    d3.insert(canonicalize(s, 3));
    r1.insert(canonicalize(s, 3, 1));
  }
  auto want3 = letters({"ac", "aec", "eec", "ad", "aed", "eed", "bfc", "fec",
                        "bfd", "fed"});
  c.expect(d3 == want3, "suffix d=3 gave " + lettersText(d3));
  auto wantR1 = letters({"ac", "aec", "ad", "aed", "bfc", "fec", "bfd", "fed"});
  c.expect(r1 == wantR1, "r=1 gave " + lettersText(r1));
  c.expect(canonicalize({"a", "e", "e", "c"}, 3, 1) ==
               ContextString{"a", "e", "c"},
           "canonicalize(aeec, 3, 1) != aec");

  // The same shape written as a program; labels are <caller>/<k>.
  ProgramModel m = loadModel("calls");
  std::map<std::string, std::string> rename = {
      {"top/1", "a"}, {"top/2", "b"}, {"b/1", "f"},
      {"c/1", "c"},   {"c/2", "d"},   {"c/3", "e"}};
  std::set<ContextString> renamed;
  for (const auto &s : m.contexts.at(0)) {
    ContextString r;
    for (const auto &l : s)
      r.push_back(rename.count(l) ? rename.at(l) : l);
    renamed.insert(r);
  }
  c.expect(renamed == want,
           "calls.hl contexts " + text(m.contexts.at(0)));
}

void criterion2(Check &c) {
  CallGraph g = callsGraph(3);
  EdgeColoring colors = assignEdgeColors(g);
  auto ad = resolveContext(g, colors, {"a", "d"}, 1);
  c.expect(ad == ContextString{"a", "d"}, "a,d resolved to " + contextText(ad));
  auto ed = resolveContext(g, colors, {"b", "f", "e", "d"}, 1);
  c.expect(ed == ContextString{"e", "d"},
           "b,f,e,d resolved to " + contextText(ed));

  CallGraph lib = addSentinels(callsGraph(3), {"C"});
  EdgeColoring libColors = assignEdgeColors(lib);
  std::string entry = sentinelName("C") + "/0";
  c.expect(lib.edgeByLabel(entry) != nullptr, "no sentinel edge " + entry);
  auto sc = resolveContext(lib, libColors, {"a", "c", entry, "c"}, 1);
  c.expect(sc == ContextString{"c"},
           "sentinel scenario resolved to " + contextText(sc));
}

void criterion3(Check &c) {
  CallGraph g = callsGraph(3);
  EdgeColoring colors = assignEdgeColors(g);
  auto contexts = contextStrings(g, 1);
  CellPlan plan;
  plan.vertices = {"C", "D"};
  SwitchTree t = buildSwitchTree(g, colors, "D", contexts);
  ExprPtr lowered = lowerSwitch(t, plan, [](const ContextString &s) {
    std::string name;
    for (const auto &l : s)
      name += l;
    return build::var(name);
  });

  // D's incoming edges c, d get colors 1, 2; C's a, e, f get 1, 2, 3.
  auto inner = [](const std::string &last) {
    return "let __c = deref __color_C in "
           "match __c with 1 then a" + last +
           " else match __c with 2 then e" + last + " else bf" + last;
  };
  std::string want = "let __c = deref __color_D in match __c with 1 then (" +
                     inner("c") + ") else (" + inner("d") + ")";
  ExprPtr expected = parseExpr(want);
  c.expect(structurallyEqual(*lowered, *expected),
           "lowered switch:\n" + prettyPrint(*lowered));
  c.expect(t.depth() == 2 && t.cases.size() == 2 &&
               t.cases[0].next->cases.size() == 3 &&
               t.cases[1].next->cases.size() == 3 && t.leaves().size() == 6,
           "switch tree is not 2 x 3 with six leaves");
}

const MeasuringPoint *findPoint(const DependencyAnalysis &a, const Program &p,
                                const std::string &function, PointKind kind,
                                const std::string &builtin = {}) {
  for (const auto &m : a.points) {
    if (m.function != function || m.kind != kind)
      continue;
    const Expr &e = p.node(m.node);
    if (!builtin.empty() &&
        (e.kind != ExprKind::App || e.child(0).kind != ExprKind::Var ||
         e.child(0).name != builtin))
      continue;
    return &m;
  }
  return nullptr;
}

std::string holeSet(const ProgramModel &m, const std::set<int> &ids) {
  std::string out = "{";
  for (int id : ids)
    out += (out.size() > 1 ? "," : "") + m.hole(id).name;
  return out + "}";
}

/// Right-hand side of the first let binding `name`.
const Expr *letRhs(const Program &p, const std::string &name) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Expr &e = p.node(static_cast<NodeId>(i));
    if (e.kind == ExprKind::Let && e.name == name)
      return &e.child(0);
  }
  return nullptr;
}

void criterion4(Check &c) {
  // Execution dependencies per point and data dependencies of `data` (the
  // query-side input) and `dists`, without and with annotations.
  auto check = [&](const ProgramModel &m, bool annotated) {
    DependencyAnalysis a = buildDependencyGraph(m);
    int seq = m.holeNamed("seqThreshold").id;
    int par = m.holeNamed("parThreshold").id;
    int sort = m.holeNamed("sortThreshold").id;
    const std::set<int> all = {seq, par, sort};
    std::string tag = annotated ? "annotated " : "plain ";
    struct Want {
      const char *what;
      const MeasuringPoint *point;
      std::set<int> holes;
    };
    std::vector<Want> wants = {
        {"subsequence",
         findPoint(a, m.program, "knnClassify", PointKind::BuiltinCall,
                   "subsequence"),
         annotated ? std::set<int>{seq} : all},
        {"map branch", findPoint(a, m.program, "map", PointKind::Match),
         std::set<int>{seq, par}},
        {"sort branch", findPoint(a, m.program, "sort", PointKind::Match),
         annotated ? std::set<int>{seq, sort} : all},
    };
    std::set<int> seen;
    for (const auto &w : wants) {
      c.expect(w.point != nullptr, tag + w.what + ": no measuring point");
      if (!w.point)
        continue;
      c.expect(w.point->holes == w.holes,
               tag + w.what + ": got " + holeSet(m, w.point->holes));
      seen.insert(w.point->holes.begin(), w.point->holes.end());
    }
    if (!annotated)
      c.expect(seen == all, "plain: not every hole is execution dependent");
    struct Data {
      const char *var;
      std::set<int> deps;
    };
    for (const Data &d :
         {Data{"data", {seq}},
          Data{"dists", annotated ? std::set<int>{seq} : std::set<int>{seq, par}}}) {
      const Expr *rhs = letRhs(m.program, d.var);
      c.expect(rhs != nullptr, tag + "no binding " + d.var);
      if (rhs)
        c.expect(m.flow.dataDeps(rhs->id) == d.deps,
                 tag + d.var + " data deps " +
                     holeSet(m, m.flow.dataDeps(rhs->id)));
    }
  };
  ProgramModel knn = loadModel("knn");
  check(knn, true);
  check(analyzeProgram(stripIndependent(knn.program)), false);
}

void criterion5(Check &c) {
  for (int n = 1; n <= 20; ++n) {
    SearchSize want = SearchSize(1) << n;
    c.expect(reducedSearchSpaceSize(fullyDependentGraph(n), booleanDomains(n)) ==
                 want,
             "fully dependent n=" + std::to_string(n));
  }
  c.expect(reducedSearchSpaceSize(partialGraph(), booleanDomains(4)) == 4,
           "partial graph reduced size != 4");
  for (int n : {1, 4, 10}) {
    auto m = buildConfigurationMatrix(independentGraph(n), booleanDomains(n),
                                      std::vector<std::int64_t>(n, 0));
    c.expect(m.rows.size() == 2,
             "independent n=" + std::to_string(n) + " gave " +
                 std::to_string(m.rows.size()) + " rows");
  }
  auto partial = buildConfigurationMatrix(partialGraph(), booleanDomains(4),
                                          std::vector<std::int64_t>(4, 0));
  c.expect(partial.rows.size() == 4, "partial graph gave " +
                                         std::to_string(partial.rows.size()) +
                                         " rows");
  c.expect(coversAll(partialGraph(), booleanDomains(4), partial.rows),
           "partial matrix does not cover every point tuple");

  ProgramModel knn = loadModel("knn");
  DependencyAnalysis a = buildDependencyGraph(knn);
  Domains d = holeDomains(a.graph, knn.expansionInput());
  SearchSize original = originalSearchSpaceSize(d);
  SearchSize reduced = reducedSearchSpaceSize(a.graph, d);
  c.expect(original == 216 && reduced == 36,
           "knn original=" + original.str() + " reduced=" + reduced.str());
  TuneReport r;
  r.originalSize = original;
  r.reducedSize = reduced;
  std::ostringstream pct;
  pct << std::fixed << std::setprecision(1) << r.reductionPercent();
  c.expect(pct.str() == "83.3", "knn reduction " + pct.str() + "%");
}

void criterion6(Check &c) {
  DependencyGraph dg = partialGraph();
  Domains d = booleanDomains(4);
  ConfigurationMatrix m;
  // The '?' cells of rows 3 and 4 are filled with h4 = false, which row 1
  // already observed at cost 1.
  m.rows = {{0, 0, 0, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}, {1, 1, 1, 0}};
  const std::int64_t costs[4][3] = {{7, 5, 1}, {2, 4, 2}, {3, 6, 1}, {6, 3, 1}};
  std::vector<std::optional<ObservationRow>> obs;
  for (const auto &row : costs) {
    ObservationRow o;
    for (int p = 0; p < 3; ++p)
      o.points[p + 1] = {row[p], 1};
    obs.push_back(o);
  }
  Selection s = selectOptimalAssignment(dg, d, {0, 0, 0, 0}, m, obs);
  c.expect(s.values == std::vector<std::int64_t>{0, 1, 1, 0},
           "selected h1..h4 differ from false,true,true,false");
  c.expect(s.estimatedCost == 6,
           "estimated cost " + std::to_string(s.estimatedCost));

  auto mats = explicitMatrices(dg, d, m, obs);
  c.expect(mats.size() == 2, "expected two components");
  if (mats.size() == 2) {
    const auto &big = mats[0];
    const std::vector<std::pair<double, double>> want = {
        {7, 5}, {7, 6}, {2, 4}, {2, 3}, {3, 5}, {3, 6}, {6, 4}, {6, 3}};
    c.expect(big.holes == std::vector<std::size_t>{0, 1, 2} &&
                 big.rows.size() == 8,
             "first component is not the 8-row h1..h3 matrix");
    for (std::size_t i = 0; i < big.rows.size() && i < want.size(); ++i) {
      const auto &r = big.rows[i];
      bool ok = r.costs.size() == 2 && r.costs[0] && r.costs[1] &&
                *r.costs[0] == want[i].first && *r.costs[1] == want[i].second;
      c.expect(ok, "explicit row " + std::to_string(i + 1));
    }
    c.expect(mats[1].rows.size() == 2, "h4 component is not two rows");
  }
}

void criterion7(Check &c) {
  Rng rng(7);
  int programs = 0;
  while (programs < 200) {
    std::string src = randomProgram(rng);
    ProgramModel m = modelFromSource(src);
    TuningBuild b = buildTuningExecutable(m);
    ++programs;
    Assignment a = randomAssignment(m.expansionInput(), rng);
    EvalOptions opt;
    opt.args = {std::uniform_int_distribution<std::int64_t>(0, 5)(rng)};
    opt.slots = slotValues(b.executable.input, a);
    opt.pointCount = b.executable.pointCount;
    EvalResult r = evaluate(b.executable.program, opt);
    std::int64_t sum = 0;
    for (const auto &log : r.instrumentation.log)
      sum += log.cost;
    c.expect(sum <= r.cost.total, "program " + std::to_string(programs) +
                                      ": point costs exceed the total");
    c.expect(r.instrumentation.lock == 0,
             "program " + std::to_string(programs) + ": lock held at exit");
  }

  ProgramModel loop = loadModel("countdown");
  TuningBuild b = buildTuningExecutable(loop);
  c.expect(b.warnings.empty(), "countdown instrumentation warned");
  auto run = runExecutable(b.executable, defaultAssignment(b.executable.input),
                           {1000000}, CostMode::Steps);
  c.expect(valueToString(run.value) == "3000000",
           "countdown value " + valueToString(run.value));
  c.expect(run.stats.maxDepth < 1000,
           "countdown reached evaluator depth " +
               std::to_string(run.stats.maxDepth));
}

void criterion8(Check &c) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    RandomGraphOptions o;
    o.sentinels = i % 2 == 1;
    CallGraph g = randomCallGraph(rng, o);
    auto walk = randomWalk(g, rng, 50);
    std::string home = walk.empty() ? "v0" : g.edgeByLabel(walk.back())->to;
    int depth = std::uniform_int_distribution<int>(0, 6)(rng);
    g.addHole({1, "h", depth, home});
    EdgeColoring colors = assignEdgeColors(g);
    ContextString got = resolveContext(g, colors, walk, 1);
    ContextString want = historyContext(g, walk, home, depth);
    c.expect(got == want, "graph " + std::to_string(i) + ": " +
                              contextText(got) + " vs " + contextText(want));
  }
}

std::int64_t totalCost(const ProgramModel &m, const Assignment &a,
                       const std::vector<std::vector<std::int64_t>> &inputs) {
  std::int64_t sum = 0;
  for (const auto &args : inputs)
    sum += runCompiled(m, a, args).cost.total;
  return sum;
}

void criterion9(Check &c) {
  Rng rng(9);
  int done = 0, attempts = 0;
  const std::vector<std::vector<std::int64_t>> inputs = {{1}, {4}};
  while (done < 100 && attempts < 1000) {
    ++attempts;
    RandomProgramOptions o;
    o.maxFunctions = 3;
    std::string src = randomProgram(rng, o);
    ProgramModel m = modelFromSource(src);
    ExpansionInput input = m.expansionInput();
    if (m.holes.empty() || assignmentCount(input, 64) > 64)
      continue;
    auto all = allAssignments(input);
    TuningBuild b = buildTuningExecutable(m);
    auto violations = flipViolations(m, b, all, inputs);
    c.expect(violations.empty(), "unsound dependency graph:\n" + src + "\n" +
                                     (violations.empty() ? "" : violations[0]));
    if (!violations.empty())
      continue;
    ++done;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto &a : all)
      best = std::min(best, totalCost(m, a, inputs));
    TuneReport r = tune(m, inputs);
    std::int64_t tuned = totalCost(m, r.assignment, inputs);
    c.expect(tuned == best, "program " + std::to_string(done) + ": tuned " +
                                std::to_string(tuned) + " vs optimum " +
                                std::to_string(best) + "\n" + src);
  }
  c.expect(done == 100, "only " + std::to_string(done) + " programs checked");

  ProgramModel knn = loadModel("knn");
  const std::vector<std::vector<std::int64_t>> knnInputs = {{10}, {60}, {120}};
  TuneReport r = tune(knn, knnInputs);
  c.expect(r.rowsRun == 36, "knn ran " + std::to_string(r.rowsRun) + " rows");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  auto all = allAssignments(knn.expansionInput());
  c.expect(all.size() == 216, "knn exhaustive space has " +
                                  std::to_string(all.size()) + " rows");
  for (const auto &a : all)
    best = std::min(best, totalCost(knn, a, knnInputs));
  std::int64_t tuned = totalCost(knn, r.assignment, knnInputs);
  c.expect(tuned == best, "knn tuned " + std::to_string(tuned) +
                              " vs exhaustive " + std::to_string(best));
}

void criterion10(Check &c) {
  Rng rng(10);
  const std::vector<std::pair<std::string, std::int64_t>> examples = {
      {"calls", 0}, {"map", 40}, {"knn", 40}, {"sort", 40}, {"countdown", 50}};
  for (const auto &[name, arg] : examples) {
    ProgramModel m = loadModel(name);
    for (int k = 0; k < 8; ++k) {
      Assignment a = randomAssignment(m.expansionInput(), rng);
      Value got = runCompiled(m, a, {arg}).value;
      Value want = evaluateByHistory(m, a, {arg}).value;
      c.expect(valuesEqual(got, want), name + ": " + valueToString(got) +
                                           " vs " + valueToString(want));
    }
  }
  for (int i = 0; i < 100; ++i) {
    std::string src = randomProgram(rng);
    ProgramModel m = modelFromSource(src);
    Assignment a = randomAssignment(m.expansionInput(), rng);
    std::int64_t arg = std::uniform_int_distribution<std::int64_t>(0, 5)(rng);
    Value got = runCompiled(m, a, {arg}).value;
    Value want = evaluateByHistory(m, a, {arg}).value;
    c.expect(valuesEqual(got, want), "random program:\n" + src);
  }
}

} // namespace

int main() {
  struct Criterion {
    const char *title;
    std::function<void(Check &)> run;
  };
  const std::vector<Criterion> criteria = {
      {"context strings of the running example", criterion1},
      {"coloring traversals and sentinels", criterion2},
      {"context expansion switch for a depth-3 hole", criterion3},
      {"knn execution dependencies with and without annotations", criterion4},
      {"search-space sizes and configuration rows", criterion5},
      {"optimal selection from the partial observation table", criterion6},
      {"instrumentation accounting and tail loops", criterion7},
      {"runtime context resolution against call-string oracle", criterion8},
      {"tuned cost equals the exhaustive optimum", criterion9},
      {"context expansion preserves values", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].run(check);
    } catch (const std::exception &e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    bool ok = check.failures.empty();
    failed += !ok;
    std::cout << "criterion " << i + 1 << ": " << (ok ? "PASS" : "FAIL")
              << " - " << criteria[i].title << " (" << check.cases
              << " checks, " << std::fixed << std::setprecision(1)
              << took.count() << " s)\n";
    for (const auto &f : check.failures)
      std::cout << "    " << f << "\n";
    std::cout.flush();
  }
  return failed == 0 ? 0 : 1;
}
