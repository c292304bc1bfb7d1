#include "holetune/tuner.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

namespace holetune {

namespace {

/// Largest tuple or assignment space enumerated explicitly.
constexpr std::uint64_t kMaxEnumeration = 10'000'000;

const HoleSpec &specOf(const ExpansionInput &input, const ContextHole &h) {
  return input.holes.at(h.holeId - 1).spec;
}

/// Mixed-radix view of the tuples over a list of columns; the first column is
/// the most significant digit.
struct TupleSpace {
  std::vector<std::size_t> cols;
  std::vector<std::size_t> radix;
  std::uint64_t size = 1;

  TupleSpace(std::vector<std::size_t> columns, const Domains &domains)
      : cols(std::move(columns)) {
    for (std::size_t c : cols) {
      radix.push_back(domains[c].size());
      if (size > kMaxEnumeration / std::max<std::size_t>(radix.back(), 1))
        throw Error("search space of " + std::to_string(size) + "x" +
                    std::to_string(radix.back()) +
                    " tuples is too large to enumerate");
      size *= radix.back();
    }
  }

  /// Domain positions of tuple `t`.
  std::vector<std::size_t> decode(std::uint64_t t) const {
    std::vector<std::size_t> pos(cols.size());
    for (std::size_t i = cols.size(); i-- > 0;) {
      pos[i] = t % radix[i];
      t /= radix[i];
    }
    return pos;
  }

  /// Tuple index of a row, or nullopt if a value lies outside its domain.
  std::optional<std::uint64_t> index(const std::vector<std::int64_t> &row,
                                     const Domains &domains) const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto &d = domains[cols[i]];
      auto it = std::find(d.begin(), d.end(), row[cols[i]]);
      if (it == d.end())
        return std::nullopt;
      t = t * radix[i] + static_cast<std::uint64_t>(it - d.begin());
    }
    return t;
  }
};

std::vector<std::size_t> pointColumns(const DependencyGraph &dg,
                                      std::size_t p) {
  auto cols = dg.holesOf(p);
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  return cols;
}

class ScopedEnv {
public:
  ScopedEnv(const char *name, const std::string &value) : name_(name) {
    if (const char *old = std::getenv(name))
      old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (old_)
      ::setenv(name_, old_->c_str(), 1);
    else
      ::unsetenv(name_);
  }

private:
  const char *name_;
  std::optional<std::string> old_;
};

} // namespace

Domains holeDomains(const DependencyGraph &dg, const ExpansionInput &input,
                    std::optional<std::int64_t> step) {
  Domains out;
  for (const auto &h : dg.holes) {
    HoleSpec spec = specOf(input, h);
    if (step && spec.kind == HoleKind::IntRange)
      spec.step = *step;
    out.push_back(holeDomain(spec));
  }
  return out;
}

std::vector<std::int64_t> holeDefaults(const DependencyGraph &dg,
                                       const ExpansionInput &input) {
  std::vector<std::int64_t> out;
  for (const auto &h : dg.holes)
    out.push_back(specOf(input, h).defaultValue);
  return out;
}

SearchSize originalSearchSpaceSize(const Domains &domains) {
  SearchSize n = 1;
  for (const auto &d : domains)
    n *= d.size();
  return n;
}

SearchSize reducedSearchSpaceSize(const DependencyGraph &dg,
                                  const Domains &domains) {
  SearchSize best = 1;
  for (std::size_t p = 0; p < dg.points.size(); ++p) {
    SearchSize n = 1;
    for (std::size_t c : pointColumns(dg, p))
      n *= domains[c].size();
    best = std::max(best, n);
  }
  return best;
}

ConfigurationMatrix buildConfigurationMatrix(
    const DependencyGraph &dg, const Domains &domains,
    const std::vector<std::int64_t> &defaults) {
  std::vector<TupleSpace> spaces;
  std::vector<std::vector<bool>> covered;
  std::vector<std::uint64_t> remaining;
  for (std::size_t p = 0; p < dg.points.size(); ++p) {
    spaces.emplace_back(pointColumns(dg, p), domains);
    covered.emplace_back(spaces.back().size, false);
    remaining.push_back(spaces.back().size);
  }

  ConfigurationMatrix m;
  std::vector<std::size_t> order(dg.points.size());
  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return remaining[a] > remaining[b];
    });
    if (order.empty() || remaining[order.front()] == 0)
      break;

    std::vector<std::optional<std::size_t>> fixed(domains.size());
    for (std::size_t p : order) {
      if (remaining[p] == 0)
        continue;
      const TupleSpace &s = spaces[p];
      for (std::uint64_t t = 0; t < s.size; ++t) {
        if (covered[p][t])
          continue;
        auto pos = s.decode(t);
        bool fits = true;
        for (std::size_t i = 0; i < s.cols.size() && fits; ++i)
          fits = !fixed[s.cols[i]] || *fixed[s.cols[i]] == pos[i];
        if (!fits)
          continue;
        for (std::size_t i = 0; i < s.cols.size(); ++i)
          fixed[s.cols[i]] = pos[i];
        break;
      }
    }

    std::vector<std::int64_t> row(domains.size());
    for (std::size_t c = 0; c < domains.size(); ++c)
      row[c] = fixed[c] ? domains[c][*fixed[c]] : defaults[c];
    for (std::size_t p = 0; p < spaces.size(); ++p)
      if (auto t = spaces[p].index(row, domains); t && !covered[p][*t]) {
        covered[p][*t] = true;
        --remaining[p];
      }
    m.rows.push_back(std::move(row));
  }
  // Without points the single configuration is the defaults.
  if (m.rows.empty())
    m.rows.push_back(defaults);
  return m;
}

bool coversAll(const DependencyGraph &dg, const Domains &domains,
               const std::vector<std::vector<std::int64_t>> &rows) {
  for (std::size_t p = 0; p < dg.points.size(); ++p) {
    TupleSpace s(pointColumns(dg, p), domains);
    std::set<std::uint64_t> seen;
    for (const auto &row : rows)
      if (auto t = s.index(row, domains))
        seen.insert(*t);
    if (seen.size() != s.size)
      return false;
  }
  return true;
}

Assignment rowAssignment(const DependencyGraph &dg,
                         const std::vector<std::int64_t> &row) {
  Assignment a;
  for (std::size_t c = 0; c < dg.holes.size(); ++c)
    a[dg.holes[c]] = row.at(c);
  return a;
}

RowResult runRow(const TuningExecutable &exe, const DependencyGraph &dg,
                 const std::vector<std::int64_t> &row, std::size_t rowIndex,
                 const std::vector<std::vector<std::int64_t>> &inputs,
                 CostMode mode, bool test) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() /
                 ("holetune-" + std::to_string(::getpid()) + "-row" +
                  std::to_string(rowIndex));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{dir};

  fs::path tunePath = dir / "row.tune";
  fs::path logPath = dir / "row.log";
  writeTuneFile(rowAssignment(dg, row), exe.input, tunePath.string());
  ScopedEnv tuneEnv(kTuneEnv, tunePath.string());
  ScopedEnv logEnv(kLogEnv, logPath.string());

  RowResult out;
  const std::vector<std::vector<std::int64_t>> none{{}};
  for (const auto &args : inputs.empty() ? none : inputs) {
    std::vector<std::string> warnings;
    try {
      runExecutableFromEnvironment(exe, args, mode, test, warnings);
    } catch (const AssertFailure &e) {
      out.feasible = false;
      out.reason = e.what();
      return out;
    } catch (const Error &e) {
      throw RowFailed(rowIndex, e.what());
    }
    std::ifstream in(logPath);
    std::ostringstream text;
    text << in.rdbuf();
    out.observation += parseLog(text.str());
  }
  return out;
}

std::set<int> profileFilter(const TuningExecutable &exe,
                            const DependencyGraph &dg, const Domains &domains,
                            int runs, double threshold,
                            const std::vector<std::vector<std::int64_t>> &inputs,
                            CostMode mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<int, double> sum;
  int ok = 0;
  for (int r = 0; r < runs; ++r) {
    std::vector<std::int64_t> row;
    for (const auto &d : domains) {
      std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
      row.push_back(d[pick(rng)]);
    }
    try {
      RowResult res = runRow(exe, dg, row, static_cast<std::size_t>(r), inputs,
                             mode, false);
      for (const auto &[id, log] : res.observation.points)
        sum[id] += static_cast<double>(log.cost);
      ++ok;
    } catch (const RowFailed &) {
    }
  }
  std::set<int> kept;
  for (const auto &inst : dg.points) {
    double mean = ok == 0 ? threshold : sum[inst.id] / ok;
    if (mean >= threshold)
      kept.insert(inst.id);
  }
  return kept;
}

namespace {

/// Per point: tuple -> (sum, count) over observed rows, and realized tuples.
struct PointStats {
  TupleSpace space;
  std::map<std::uint64_t, std::pair<double, int>> observed;
  std::set<std::uint64_t> realized;
};

struct Component {
  std::vector<std::size_t> holes;
  std::vector<std::size_t> points;
};

/// Connected components that contain at least one point, ordered by their
/// first hole.
std::vector<Component> components(const DependencyGraph &dg) {
  const std::size_t H = dg.holes.size();
  const std::size_t P = dg.points.size();
  // Union-find over holes [0, H) and points [H, H + P).
  std::vector<std::size_t> parent(H + P);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto &[h, p] : dg.edges)
    parent[find(h)] = find(H + p);
  std::map<std::size_t, std::size_t> slot;
  std::vector<Component> out;
  auto at = [&](std::size_t x) -> Component & {
    auto [it, fresh] = slot.emplace(find(x), out.size());
    if (fresh)
      out.emplace_back();
    return out[it->second];
  };
  for (std::size_t h = 0; h < H; ++h)
    at(h).holes.push_back(h);
  for (std::size_t p = 0; p < P; ++p)
    at(H + p).points.push_back(p);
  std::erase_if(out, [](const Component &c) { return c.points.empty(); });
  return out;
}

std::vector<PointStats>
pointStats(const DependencyGraph &dg, const Domains &domains,
           const ConfigurationMatrix &matrix,
           const std::vector<std::optional<ObservationRow>> &obs) {
  std::vector<PointStats> stats;
  for (std::size_t p = 0; p < dg.points.size(); ++p) {
    PointStats s{TupleSpace(pointColumns(dg, p), domains), {}, {}};
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
      auto t = s.space.index(matrix.rows[i], domains);
      if (!t)
        continue;
      s.realized.insert(*t);
      if (i < obs.size() && obs[i]) {
        auto &[sum, n] = s.observed[*t];
        sum += static_cast<double>(obs[i]->cost(dg.points[p].id));
        ++n;
      }
    }
    stats.push_back(std::move(s));
  }
  return stats;
}

/// Calls `visit(values, costs)` for every combination of the component's
/// hole values; a cost is absent when no executed row observed its tuple.
template <typename Visit>
void enumerate(const DependencyGraph &dg, const Domains &domains,
               const std::vector<PointStats> &stats, const Component &comp,
               bool partial, Visit visit) {
  TupleSpace space(comp.holes, domains);
  std::vector<std::int64_t> row(dg.holes.size());
  std::vector<std::int64_t> values(comp.holes.size());
  std::vector<std::optional<double>> costs(comp.points.size());
  for (std::uint64_t t = 0; t < space.size; ++t) {
    auto pos = space.decode(t);
    for (std::size_t i = 0; i < comp.holes.size(); ++i)
      row[comp.holes[i]] = values[i] = domains[comp.holes[i]][pos[i]];
    for (std::size_t k = 0; k < comp.points.size(); ++k) {
      const PointStats &s = stats[comp.points[k]];
      std::uint64_t tp = *s.space.index(row, domains);
      auto it = s.observed.find(tp);
      if (it != s.observed.end()) {
        costs[k] = it->second.first / it->second.second;
        continue;
      }
      if (!partial && !s.realized.count(tp))
        throw IncompleteCoverage(
            "configuration matrix misses a value combination of point m" +
            std::to_string(dg.points[comp.points[k]].id));
      costs[k] = std::nullopt;
    }
    visit(values, costs);
  }
}

} // namespace

std::vector<ExplicitMatrix>
explicitMatrices(const DependencyGraph &dg, const Domains &domains,
                 const ConfigurationMatrix &matrix,
                 const std::vector<std::optional<ObservationRow>> &obs,
                 bool partial) {
  auto stats = pointStats(dg, domains, matrix, obs);
  std::vector<ExplicitMatrix> out;
  for (const Component &comp : components(dg)) {
    ExplicitMatrix m{comp.holes, comp.points, {}};
    enumerate(dg, domains, stats, comp, partial,
              [&](const auto &values, const auto &costs) {
                m.rows.push_back({values, costs});
              });
    out.push_back(std::move(m));
  }
  return out;
}

Selection selectOptimalAssignment(
    const DependencyGraph &dg, const Domains &domains,
    const std::vector<std::int64_t> &defaults, const ConfigurationMatrix &matrix,
    const std::vector<std::optional<ObservationRow>> &obs, bool partial) {
  auto stats = pointStats(dg, domains, matrix, obs);
  Selection out;
  out.values = defaults;
  for (const Component &comp : components(dg)) {
    std::optional<double> best;
    std::vector<std::int64_t> bestValues;
    enumerate(dg, domains, stats, comp, partial,
              [&](const auto &values, const auto &costs) {
                double cost = 0;
                for (const auto &c : costs) {
                  if (!c)
                    return;
                  cost += *c;
                }
                if (!best || cost < *best) {
                  best = cost;
                  bestValues = values;
                }
              });
    if (!best) {
      ++out.unresolvedComponents;
      continue;
    }
    for (std::size_t i = 0; i < comp.holes.size(); ++i)
      out.values[comp.holes[i]] = bestValues[i];
    out.estimatedCost += *best;
  }
  return out;
}

double TuneReport::reductionPercent() const {
  if (originalSize == 0 || reducedSize >= originalSize)
    return 0;
  using Float = boost::multiprecision::cpp_bin_float_50;
  Float ratio = Float(reducedSize) / Float(originalSize);
  return static_cast<double>(100 * (1 - ratio));
}

std::string TuneReport::text(const ExpansionInput &input) const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "context holes: " << contextHoles << "\n";
  out << "measuring points: " << points << " (kept " << pointsKept << ")\n";
  out << "search space: original=" << originalSize
      << " reduced=" << reducedSize << " (" << reductionPercent()
      << "% reduction)\n";
  if (filteredSize)
    out << "after filtering: reduced=" << *filteredSize << "\n";
  out << "rows: planned=" << rowsPlanned << " run=" << rowsRun
      << " infeasible=" << rowsInfeasible << "\n";
  out << "coverage: " << (partial ? "partial" : "complete") << "\n";
  out << "estimated cost: " << estimatedCost << "\n";
  out << "best configuration:\n";
  std::istringstream lines(formatTuneFile(assignment, input));
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line))
    out << "  " << line << "\n";
  for (const auto &w : warnings)
    out << "warning: " << w << "\n";
  return out.str();
}

std::string TuneReport::keyValues() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "original=" << originalSize << "\n";
  out << "reduced=" << reducedSize << "\n";
  out << "reduction_percent=" << reductionPercent() << "\n";
  if (filteredSize)
    out << "filtered=" << *filteredSize << "\n";
  out << "context_holes=" << contextHoles << "\n";
  out << "points=" << points << "\n";
  out << "points_kept=" << pointsKept << "\n";
  out << "rows_planned=" << rowsPlanned << "\n";
  out << "rows_run=" << rowsRun << "\n";
  out << "rows_infeasible=" << rowsInfeasible << "\n";
  out << "partial=" << (partial ? "true" : "false") << "\n";
  out << "estimated_cost=" << estimatedCost << "\n";
  return out.str();
}

TuneReport tune(const ProgramModel &model,
                const std::vector<std::vector<std::int64_t>> &inputs,
                const TuneOptions &options) {
  auto started = std::chrono::steady_clock::now();
  TuneReport report;
  TuningBuild build =
      buildTuningExecutable(model, {options.tailForm, options.threads});
  report.warnings = build.warnings;
  const TuningExecutable &exe = build.executable;
  DependencyGraph dg = build.analysis.graph;

  Domains domains = holeDomains(dg, exe.input, options.step);
  std::vector<std::int64_t> defaults = holeDefaults(dg, exe.input);
  report.contextHoles = dg.holes.size();
  report.points = dg.points.size();
  report.originalSize = originalSearchSpaceSize(domains);
  report.reducedSize = reducedSearchSpaceSize(dg, domains);

  if (options.filterRuns > 0) {
    auto kept = profileFilter(exe, dg, domains, options.filterRuns,
                              options.filterThreshold, inputs, options.mode,
                              options.seed);
    dg = dg.restrictedTo(kept);
    report.filteredSize = reducedSearchSpaceSize(dg, domains);
  }
  report.pointsKept = dg.points.size();

  ConfigurationMatrix matrix = buildConfigurationMatrix(dg, domains, defaults);
  report.rowsPlanned = matrix.rows.size();

  std::vector<std::optional<ObservationRow>> obs(matrix.rows.size());
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    if (options.maxRows && i >= *options.maxRows)
      break;
    if (options.timeoutSeconds) {
      std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - started;
      if (elapsed.count() >= *options.timeoutSeconds)
        break;
    }
    ++report.rowsRun;
    try {
      RowResult r = runRow(exe, dg, matrix.rows[i], i, inputs, options.mode,
                           options.test);
      if (r.feasible)
        obs[i] = std::move(r.observation);
      else
        ++report.rowsInfeasible;
    } catch (const RowFailed &e) {
      ++report.rowsInfeasible;
      report.warnings.push_back(std::string(e.what()) +
                                "; row treated as infeasible");
    }
  }
  report.partial = report.rowsRun < matrix.rows.size();
  if (report.rowsRun > 0 && report.rowsInfeasible == report.rowsRun)
    throw RuntimeError("all " + std::to_string(report.rowsRun) +
                " configurations failed; no tune file written");
  if (report.partial)
    report.warnings.push_back(
        "partial coverage: " + std::to_string(report.rowsRun) + " of " +
        std::to_string(matrix.rows.size()) +
        " rows executed; unobserved combinations were not considered");

  Selection sel = selectOptimalAssignment(dg, domains, defaults, matrix, obs,
                                          report.partial);
  if (sel.unresolvedComponents > 0)
    report.warnings.push_back(std::to_string(sel.unresolvedComponents) +
                              " component(s) had no observed configuration; "
                              "their holes keep default values");
  report.estimatedCost = sel.estimatedCost;
  report.assignment = rowAssignment(dg, sel.values);
  return report;
}

} // namespace holetune
