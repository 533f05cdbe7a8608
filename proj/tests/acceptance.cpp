// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "ifeig/cross.hpp"
#include "ifeig/dense.hpp"
#include "ifeig/eigen.hpp"
#include "ifeig/examples.hpp"
#include "ifeig/error.hpp"
#include "ifeig/fem.hpp"
#include "ifeig/locate.hpp"
#include "ifeig/measure.hpp"
#include "ifeig/mesh.hpp"
#include "ifeig/multilevel.hpp"
#include "ifeig/pcg.hpp"
#include "ifeig/run.hpp"
#include "ifeig/transfer.hpp"
#include "oracles.hpp"

using namespace ifeig;
using namespace ifeig::oracles;
namespace fs = std::filesystem;

namespace {

// Criterion 1
constexpr double kUnitSquareH = 1.0 / 64.0;
constexpr double kLambda1RelTol = 0.005;
constexpr double kLambda23RelTol = 0.01;
constexpr double kMultiplicityRelTol = 1e-3;
constexpr double kUnitSquareSeconds = 60.0;
// Criterion 2
constexpr double kLambdaAbsTol = 1e-9;
constexpr int kCheckedSlots = 4;
constexpr int kGuardedNev = 5;
constexpr int kMaxFinestIters = 6;
constexpr double kExample1Seconds = 600.0;
// Criteria 3 and 4
constexpr double kCoarseH550 = 2.0 / 17.0;
constexpr double kCoarseH1456 = 2.0 / 27.0;
constexpr double kStudyFineH = 1.0 / 36.0;
constexpr int kStudyNev = 6;
constexpr int kStudyMeasured = 4;
constexpr int kStudySteps = 10;
constexpr int kMinPreSaturation = 4;
constexpr double kHIndependenceRelTol = 0.25;
// Criterion 5
constexpr double kLevelRatioMin = 2.5, kLevelRatioMax = 6.0;
// Criterion 6
constexpr double kSlopeMin = 0.8, kSlopeMax = 1.4;
// Criterion 7
constexpr double kNestedTol = 1e-12;
constexpr double kCharPolyTol = 1e-8;
constexpr double kPcgTol = 1e-9;
// Criterion 8
constexpr double kSandwichTol = 1e-10;
constexpr double kUnityTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

bool sparse_spd(const SparseMatrix& m) {
  if (m.asymmetry() != 0.0) return false;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k)
      trip.emplace_back(static_cast<int>(i), m.col_index()[k], m.values()[k]);
  Eigen::SparseMatrix<double> e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  e.setFromTriplets(trip.begin(), trip.end());
  const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(e);
  return llt.info() == Eigen::Success;
}

// The Example 1 desk run with one guard slot, shared by criteria 2, 5 and 8.
struct DeskRun {
  RunResult result;
  double seconds = 0.0;
};

const DeskRun& desk_run() {
  static const DeskRun run = [] {
    RunConfig cfg;
    cfg.spec = example1();
    cfg.spec.plan.nev = kGuardedNev;
    cfg.record_time = false;
    cfg.max_finest_iters = kMaxFinestIters;
    const auto t0 = std::chrono::steady_clock::now();
    DeskRun r;
    r.result = run_pipeline(cfg);
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome unit_square_check() {
  ExampleSpec ex = unit_square();
  LevelPlan plan = ex.plan;
  plan.h1 = kUnitSquareH * 4.0;
  plan.n_levels = 3;
  const auto t0 = std::chrono::steady_clock::now();
  const EigenState st = multilevel_solve(plan, ex.geometry, ex.coefficient());
  const double secs = seconds_since(t0);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double e1 = rel(st.lambdas[0], pi2 / 2.0);
  const double e2 = rel(st.lambdas[1], 5.0 * pi2 / 4.0), e3 = rel(st.lambdas[2], 5.0 * pi2 / 4.0);
  const double split = rel(st.lambdas[2], st.lambdas[1]);
  const bool pass = e1 < kLambda1RelTol && e2 < kLambda23RelTol && e3 < kLambda23RelTol &&
                    split < kMultiplicityRelTol && secs < kUnitSquareSeconds;
  return {pass, fmt("h=1/64, rel err l1 %.2e, l2 %.2e, l3 %.2e, split %.2e, %.1f s", e1, e2, e3, split, secs)};
}

Outcome example1_convergence() {
  const DeskRun& run = desk_run();
  const RunResult& r = run.result;
  double worst = 0.0;
  for (int i = 0; i < kCheckedSlots; ++i) worst = std::max(worst, r.final_lambda_err[static_cast<std::size_t>(i)]);
  const bool pass = worst < kLambdaAbsTol && r.finest_iterations <= kMaxFinestIters && run.seconds < kExample1Seconds;
  return {pass, fmt("coarse %d tri, finest %d tri, %d finest iterations, max |l_i - ref| (i<=4) %.2e, %.1f s",
                    r.coarse_triangles, r.n_triangles.back(), r.finest_iterations, worst, run.seconds)};
}

struct Studies {
  ContractionStudy c550_h, c550_h2, c1456_h, c1456_h2;
};

const Studies& studies() {
  static const Studies s = [] {
    const ExampleSpec ex = example1();
    auto run = [&](double coarse, double fine) {
      return contraction_study(ex, coarse, fine, kStudyNev, kStudyMeasured, kStudySteps);
    };
    return Studies{run(kCoarseH550, kStudyFineH), run(kCoarseH550, kStudyFineH / 2.0), run(kCoarseH1456, kStudyFineH),
                   run(kCoarseH1456, kStudyFineH / 2.0)};
  }();
  return s;
}

Outcome coarse_space_effect() {
  const Studies& s = studies();
  const ContractionStudy &a = s.c550_h, &b = s.c1456_h;
  const bool pass = a.mean_contraction < 1.0 && b.mean_contraction < 1.0 && b.mean_contraction < a.mean_contraction &&
                    a.pre_saturation >= kMinPreSaturation && b.pre_saturation >= kMinPreSaturation;
  return {pass, fmt("fine %zu tri: coarse %zu tri mean %.4f over %d steps, coarse %zu tri mean %.4f over %d steps",
                    a.fine_triangles, a.coarse_triangles, a.mean_contraction, a.pre_saturation, b.coarse_triangles,
                    b.mean_contraction, b.pre_saturation)};
}

double leading_mean(const ContractionStudy& s, int steps) {
  double log_sum = 0.0;
  for (int l = 0; l < steps; ++l) log_sum += std::log(s.ratios[static_cast<std::size_t>(l)]);
  return std::exp(log_sum / steps);
}

// Means over the leading steps both fine meshes have before saturation.
std::pair<double, double> common_means(const ContractionStudy& a, const ContractionStudy& b) {
  const int steps = std::min(a.pre_saturation, b.pre_saturation);
  return {leading_mean(a, steps), leading_mean(b, steps)};
}

Outcome h_independence() {
  const Studies& s = studies();
  const auto [m1, m2] = common_means(s.c550_h, s.c550_h2);
  const auto [f1, f2] = common_means(s.c1456_h, s.c1456_h2);
  const int steps = std::min(s.c550_h.pre_saturation, s.c550_h2.pre_saturation);
  const double change = rel(m2, m1);
  return {change < kHIndependenceRelTol,
          fmt("coarse %zu tri, fine %zu -> %zu tri: mean %.4f -> %.4f over %d steps, change %.1f%% "
              "(coarse %zu tri: %.4f -> %.4f, change %.1f%%, informational)",
              s.c550_h.coarse_triangles, s.c550_h.fine_triangles, s.c550_h2.fine_triangles, m1, m2, steps,
              100.0 * change, s.c1456_h.coarse_triangles, f1, f2, 100.0 * rel(f2, f1))};
}

Outcome levelwise_accuracy() {
  const RunResult& r = desk_run().result;
  const int n_levels = static_cast<int>(r.n_dof.size());
  const ExampleSpec ex = example1();
  // Limit estimate from the finest reference and one more uniform refinement.
  const FeSpace extra(std::make_shared<const Mesh>(build_mesh(ex.geometry, ex.plan.fine_h(n_levels) / 2.0)));
  const SparseMatrix a = assemble_stiffness(extra, ex.coefficient());
  const double fine_ref = r.references.back().values[0];
  const double finer_ref = reference_eigensolve(a, assemble_mass(extra), 1).values[0];
  const double limit = finer_ref + (finer_ref - fine_ref) / 3.0;

  std::vector<double> level_lambda(static_cast<std::size_t>(n_levels), 0.0);
  for (const RunRow& row : r.rows)
    if (row.slot == 1 && row.iter <= ex.plan.L) level_lambda[static_cast<std::size_t>(row.level - 1)] = row.lambda;
  std::vector<double> err, ratio;
  for (double l : level_lambda) err.push_back(std::abs(l - limit));
  bool pass = n_levels >= 3;
  for (std::size_t k = 1; k < err.size(); ++k) {
    ratio.push_back(err[k - 1] / err[k]);
    pass = pass && ratio.back() >= kLevelRatioMin && ratio.back() <= kLevelRatioMax;
  }
  std::string d = fmt("limit %.8f; l1 errors", limit);
  for (double e : err) d += fmt(" %.3e", e);
  d += "; ratios";
  for (double q : ratio) d += fmt(" %.2f", q);
  return {pass, d};
}

Outcome linear_complexity() {
  RunConfig cfg;
  cfg.spec = example1();
  cfg.sweep = {3, 4, 5};
  cfg.out_dir = (fs::temp_directory_path() / "ifeig_acceptance_timing").string();
  fs::create_directories(cfg.out_dir);
  std::ostringstream log;
  const TimingStudy t = timing_study(cfg, log);
  std::string d = fmt("slope %.3f over", t.slope);
  for (const TimingPoint& p : t.points) d += fmt(" (%zu dof, %.2f s)", p.n_dof, p.seconds);
  return {t.slope >= kSlopeMin && t.slope <= kSlopeMax && t.points.size() >= 3, d};
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

Outcome oracle_equivalences() {
  // (a) nested pair with a two-valued coefficient.
  auto two_region = [](double h) {
    Mesh m = generate_structured_mesh({0.0, 0.0, 2.0, 2.0}, h);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) m.region[t] = m.centroid(t).x < 1.0 ? 1 : 0;
    return std::make_shared<const Mesh>(std::move(m));
  };
  const FeSpace coarse(two_region(0.25)), fine(two_region(0.125));
  const Coefficient coeff({1.0, 5.0});
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  std::vector<Vector> u(2, Vector(fine.n_dof()));
  for (auto& v : u)
    for (auto& x : v) x = g(rng);
  const BorderedSystem gs = assemble_cross(coarse, fine, coeff, u, AssemblyMode::galerkin);
  const BorderedSystem es = assemble_cross(coarse, fine, coeff, u, AssemblyMode::exact);
  const double nested = std::max({max_abs_diff(*gs.a_coarse, *es.a_coarse), max_abs_diff(*gs.b_coarse, *es.b_coarse),
                                  max_abs_diff(gs.a_border, es.a_border), max_abs_diff(gs.b_border, es.b_border),
                                  max_abs_diff(gs.alpha, es.alpha), max_abs_diff(gs.beta, es.beta)});

  // (b) 100 random pencils against characteristic-polynomial roots.
  double eig = 0.0;
  std::mt19937_64 rng_b(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 2 : 3;
    const DenseMatrix a = random_spd(n, rng_b), b = random_spd(n, rng_b);
    const std::vector<double> oracle = char_poly_roots(a, b);
    const DenseEigen e = dense_sym_gen_eig(a, b);
    for (std::size_t i = 0; i < n; ++i)
      eig = std::max(eig, std::abs(e.values[i] - oracle[i]) / std::max(1.0, std::abs(oracle[i])));
  }

  // (c) PCG against Gaussian elimination.
  double pcg = 0.0;
  std::mt19937_64 rng_c(7);
  std::uniform_int_distribution<int> size(2, 50);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(size(rng_c));
    const DenseMatrix a = random_spd(n, rng_c);
    Vector rhs(n), x0(n, 0.0);
    for (auto& v : rhs) v = g(rng_c);
    const Vector exact = dense_solve(a, rhs);
    const SolveResult s = pcg_solve(SparseMatrix::from_dense(a), rhs, x0, 1e-12, 10000);
    pcg = std::max(pcg, a_error(a, s.x, exact) / std::max(1.0, a_error(a, x0, exact)));
  }
  return {nested <= kNestedTol && eig <= kCharPolyTol && pcg <= kPcgTol,
          fmt("(a) nested max diff %.2e, (b) max rel root diff %.2e, (c) max A-norm diff %.2e", nested, eig, pcg)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome structural_invariants() {
  std::vector<std::string> failures;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };

  // Meshes, matrices, transfers and bordered masses of the Example 1 and 2 hierarchies.
  std::size_t matrices = 0, bordered = 0, unity_rows = 0;
  for (const ExampleSpec& ex : {example1(), example2()}) {
    const Hierarchy h = build_hierarchy(ex.plan, ex.geometry, ex.coefficient());
    require(min_signed_area(*h.coarse_mesh) > 0.0, ex.name + " coarse mesh inverted");
    std::vector<EigenState> per_level;
    multilevel_solve(h, ex.plan, [&](const LevelData& lv, const EigenState& st) {
      per_level.resize(static_cast<std::size_t>(lv.index));
      per_level.back() = st;
    });
    const PointLocator locator(h.coarse->mesh());
    for (const auto& level : h.levels) {
      const LevelData& lv = *level;
      const std::string tag = ex.name + " level " + std::to_string(lv.index);
      require(min_signed_area(*lv.mesh) > 0.0, tag + " mesh inverted");
      require(sparse_spd(lv.a), tag + " stiffness not SPD");
      require(sparse_spd(lv.b), tag + " mass not SPD");
      matrices += 2;
      for (std::size_t r = 0; r < lv.p.p.rows(); ++r) {
        const LocateResult loc = locator.locate(lv.mesh->nodes[static_cast<std::size_t>(lv.space->free_nodes()[r])]);
        bool interior = loc.status == LocateStatus::inside;
        for (int v : h.coarse->mesh().triangles[static_cast<std::size_t>(loc.triangle)])
          interior = interior && !h.coarse->mesh().boundary[static_cast<std::size_t>(v)];
        if (!interior) continue;
        double sum = 0.0;
        for (std::size_t k = lv.p.p.row_ptr()[r]; k < lv.p.p.row_ptr()[r + 1]; ++k) sum += lv.p.p.values()[k];
        require(std::abs(sum - 1.0) <= kUnityTol, tag + " transfer row not a partition of unity");
        ++unity_rows;
      }
      if (lv.index == 1) continue;
      const BorderedSystem sys = assemble_cross(*h.coarse, *lv.space, ex.coefficient(),
                                                per_level[static_cast<std::size_t>(lv.index - 1)].vectors,
                                                AssemblyMode::galerkin);
      bool spd = sys.mass().max_abs() > 0.0;
      try {
        cholesky(sys.mass());
      } catch (const NumericalError&) {
        spd = false;
      }
      require(spd, tag + " bordered mass not SPD");
      ++bordered;
    }
  }

  // Every augmented iterate stays above the reference of its level.
  const RunResult& r = desk_run().result;
  std::size_t sandwiched = 0;
  for (const RunRow& row : r.rows) {
    if (row.iter == 0 && row.level > 1) continue;  // carried over, not a Ritz value on this level
    const double ref = r.references[static_cast<std::size_t>(row.level - 1)].values[static_cast<std::size_t>(row.slot - 1)];
    require(row.lambda >= ref - kSandwichTol, fmt("sandwich violated at level %d iter %d slot %d", row.level,
                                                   row.iter, row.slot));
    ++sandwiched;
  }

  // Two sequential runs write identical CSVs.
  std::string csv[2];
  for (int i = 0; i < 2; ++i) {
    RunConfig cfg;
    cfg.spec = example1();
    cfg.spec.plan.coarse_h = 2.0 / 9.0;
    cfg.spec.plan.h1 = 1.0 / 9.0;
    cfg.spec.plan.n_levels = 2;
    cfg.record_time = false;
    cfg.out_dir = (fs::temp_directory_path() / ("ifeig_acceptance_csv" + std::to_string(i))).string();
    fs::create_directories(cfg.out_dir);
    std::ostringstream log;
    run_example(cfg, log);
    csv[i] = read_file(fs::path(cfg.out_dir) / "convergence.csv");
  }
  require(!csv[0].empty() && csv[0] == csv[1], "CSV differs between runs");

  std::string d = fmt("%zu SPD matrices, %zu bordered masses, %zu unity rows, %zu sandwich rows, CSV %zu bytes",
                      matrices, bordered, unity_rows, sandwiched, csv[0].size());
  for (const std::string& f : failures) d += "; " + f;
  return {failures.empty(), d};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "unit square analytic eigenvalues", unit_square_check},
      {2, "example 1 convergence to 1e-9", example1_convergence},
      {3, "coarse space refinement improves contraction", coarse_space_effect},
      {4, "contraction independent of fine mesh", h_independence},
      {5, "level-wise O(h^2) accuracy", levelwise_accuracy},
      {6, "linear complexity", linear_complexity},
      {7, "oracle equivalences", oracle_equivalences},
      {8, "structural invariants", structural_invariants},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
