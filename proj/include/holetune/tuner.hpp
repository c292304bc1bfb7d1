#pragma once

#include "holetune/pipeline.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holetune {

/// Search-space sizes overflow 64 bits on realistic programs.
using SearchSize = boost::multiprecision::cpp_int;

/// Per context hole (dependency-graph column order): its ordered values.
using Domains = std::vector<std::vector<std::int64_t>>;

/// `step`, when given, replaces the step of every integer-range hole.
Domains holeDomains(const DependencyGraph &dg, const ExpansionInput &input,
                    std::optional<std::int64_t> step = std::nullopt);
std::vector<std::int64_t> holeDefaults(const DependencyGraph &dg,
                                       const ExpansionInput &input);

/// Product of all domain sizes.
SearchSize originalSearchSpaceSize(const Domains &domains);
/// max over points of the product of the domains of adjacent holes; 1 when
/// there are no points.
SearchSize reducedSearchSpaceSize(const DependencyGraph &dg,
                                  const Domains &domains);

/// rows x |holes|; columns follow dg.holes.
struct ConfigurationMatrix {
  std::vector<std::vector<std::int64_t>> rows;
};

/// Greedy covering: each row takes, point by point (most uncovered tuples
/// first), the first uncovered tuple consistent with the cells fixed so far.
/// Cells left open get the hole default. At least one row.
ConfigurationMatrix buildConfigurationMatrix(
    const DependencyGraph &dg, const Domains &domains,
    const std::vector<std::int64_t> &defaults);

/// True when, for every point, every tuple over its holes' domains appears in
/// some row of `rows`.
bool coversAll(const DependencyGraph &dg, const Domains &domains,
               const std::vector<std::vector<std::int64_t>> &rows);

Assignment rowAssignment(const DependencyGraph &dg,
                         const std::vector<std::int64_t> &row);

struct RowResult {
  ObservationRow observation;
  bool feasible = true;
  std::string reason; // why the row is infeasible
};

/// Writes the row as a temporary tune file, runs the executable once per
/// input through HOLETUNE_TUNE/HOLETUNE_LOG, and sums the logs. With
/// `test`, a failing assert makes the row infeasible. Other runtime errors
/// throw RowFailed.
RowResult runRow(const TuningExecutable &exe, const DependencyGraph &dg,
                 const std::vector<std::int64_t> &row, std::size_t rowIndex,
                 const std::vector<std::vector<std::int64_t>> &inputs,
                 CostMode mode, bool test);

/// Ids of the points whose mean cost over `runs` random rows reaches
/// `threshold`.
std::set<int> profileFilter(const TuningExecutable &exe,
                            const DependencyGraph &dg, const Domains &domains,
                            int runs, double threshold,
                            const std::vector<std::vector<std::int64_t>> &inputs,
                            CostMode mode, std::uint64_t seed = 1);

struct Selection {
  std::vector<std::int64_t> values; // per dg.holes
  double estimatedCost = 0;
  /// Components where no fully observed assignment existed; their holes
  /// keep defaults.
  std::size_t unresolvedComponents = 0;
};

/// One connected component of the dependency graph enumerated explicitly:
/// every combination of its holes' values with each point's cost inferred from
/// the observed rows realizing that point's tuple (mean over duplicates).
struct ExplicitMatrix {
  std::vector<std::size_t> holes;  // dg.holes indices
  std::vector<std::size_t> points; // dg.points indices
  struct Row {
    std::vector<std::int64_t> values;         // per `holes`
    std::vector<std::optional<double>> costs; // per `points`
  };
  std::vector<Row> rows; // first hole most significant
};

/// Components without points are omitted. Coverage rules as for
/// selectOptimalAssignment.
std::vector<ExplicitMatrix>
explicitMatrices(const DependencyGraph &dg, const Domains &domains,
                 const ConfigurationMatrix &matrix,
                 const std::vector<std::optional<ObservationRow>> &obs,
                 bool partial = false);

/// Explicit enumeration per connected component. Rows with no observation
/// (skipped or infeasible) are ignored. With `partial` false, a tuple that no
/// row of `matrix` realizes throws IncompleteCoverage; with `partial` true,
/// assignments lacking an observation are skipped.
Selection selectOptimalAssignment(const DependencyGraph &dg,
                                  const Domains &domains,
                                  const std::vector<std::int64_t> &defaults,
                                  const ConfigurationMatrix &matrix,
                                  const std::vector<std::optional<ObservationRow>> &obs,
                                  bool partial = false);

struct TuneOptions {
  CostMode mode = CostMode::Steps;
  std::optional<std::size_t> maxRows;
  std::optional<double> timeoutSeconds;
  std::optional<std::int64_t> step;
  int filterRuns = 0;
  double filterThreshold = 0;
  bool test = false;
  bool tailForm = true;
  int threads = 1;
  std::uint64_t seed = 1;
};

struct TuneReport {
  SearchSize originalSize;
  SearchSize reducedSize;
  std::optional<SearchSize> filteredSize;
  std::size_t contextHoles = 0;
  std::size_t points = 0;
  std::size_t pointsKept = 0;
  std::size_t rowsPlanned = 0;
  std::size_t rowsRun = 0;
  std::size_t rowsInfeasible = 0;
  bool partial = false;
  double estimatedCost = 0;
  Assignment assignment;
  std::vector<std::string> warnings;

  /// 100 * (1 - reduced / original).
  double reductionPercent() const;
  std::string text(const ExpansionInput &input) const;
  /// key=value lines.
  std::string keyValues() const;
};

/// Throws RuntimeError when every executed row is infeasible.
TuneReport tune(const ProgramModel &model,
                const std::vector<std::vector<std::int64_t>> &inputs,
                const TuneOptions &options = {});

} // namespace holetune
