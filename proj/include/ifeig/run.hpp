#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ifeig/config.hpp"
#include "ifeig/measure.hpp"

namespace ifeig {

inline constexpr const char* kCsvHeader = "level,iter,slot,lambda,lambda_err,anorm_err,contraction,seconds";

struct RunRow {
  int level = 1;
  int iter = 0;
  int slot = 0;  // 1-based
  double lambda = 0.0;
  double lambda_err = 0.0;
  double anorm_err = 0.0;
  double contraction = 0.0;
  double seconds = 0.0;
};

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const RunRow& row);

struct RunResult {
  std::vector<RunRow> rows;
  EigenState state;                     // finest level, after any extra finest steps
  std::vector<EigenPairs> references;   // per level
  std::vector<std::size_t> n_dof;       // per level
  std::vector<int> n_triangles;         // per level
  int coarse_triangles = 0;
  int finest_iterations = 0;            // augmented steps on the finest level
  std::vector<double> final_lambda_err;
  bool converged = false;               // |lambda - reference| < tol_lambda for every slot
};

/// Builds the hierarchy, per-level references and runs the multilevel solve.
/// Extra augmented steps on the finest level continue until convergence or
/// max_finest_iters. Rows are reported through on_row as soon as known.
RunResult run_pipeline(const RunConfig& cfg, const std::function<void(const RunRow&)>& on_row = {});

/// run_pipeline plus out_dir/convergence.csv and out_dir/summary.txt.
/// Returns the CLI exit status (0 converged, 1 not converged).
int run_example(const RunConfig& cfg, std::ostream& log);

struct TimingPoint {
  int n_levels = 0;
  std::size_t n_dof = 0;
  double seconds = 0.0;
};

struct TimingStudy {
  std::vector<TimingPoint> points;
  double slope = 0.0;  // least-squares slope of log(seconds) vs log(n_dof)
};

double loglog_slope(const std::vector<TimingPoint>& points);

/// Times build_hierarchy + multilevel_solve for every n_levels in cfg.sweep
/// (at least 3 points) and writes out_dir/timing.csv.
TimingStudy timing_study(const RunConfig& cfg, std::ostream& log);

struct BlockDiff {
  double max_abs = 0.0;
  double max_rel = 0.0;  // max_abs / max |galerkin entry|
};

struct ModeComparison {
  int level = 0;
  std::size_t n_dof = 0;
  BlockDiff a_coarse, b_coarse, a_border, b_border;
};

/// Exact versus galerkin cross assembly on each fine level, with the
/// interpolated lowest coarse eigenfunctions as augmenting functions.
std::vector<ModeComparison> compare_modes(const RunConfig& cfg, std::ostream& log);

// Writes the coarse mesh and every level mesh to out_dir; returns the paths.
std::vector<std::string> generate_meshes(const RunConfig& cfg);

}  // namespace ifeig

namespace ifeig {

/// Repeated augmented subspace steps on one fixed fine mesh, started from the interpolated
/// lowest coarse eigenpairs. errors[l] is the summed A-norm error of the
/// first `measured` slots after l steps (l = 0 is the start); the remaining
/// slots act as guards for the spectral gap.
struct ContractionStudy {
  std::size_t coarse_triangles = 0;
  std::size_t fine_triangles = 0;
  std::vector<double> errors;
  std::vector<double> lambda_errors;  // max over slots, per entry of errors
  std::vector<double> ratios;         // errors[l+1] / errors[l]
  int pre_saturation = 0;             // leading steps with errors[l+1] above the floor
  double mean_contraction = 0.0;      // geometric mean of the leading ratios
};

inline constexpr double kSaturationFloor = 1e-10;

ContractionStudy contraction_study(const ExampleSpec& spec, double coarse_h, double fine_h, int nev, int measured,
                                   int steps, std::uint64_t seed = 1);

}  // namespace ifeig
