#include "ifeig/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "ifeig/error.hpp"
#include "ifeig/mesh_io.hpp"

namespace ifeig {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

BlockDiff diff(const DenseMatrix& exact, const DenseMatrix& galerkin) {
  BlockDiff d;
  double scale = 0.0;
  for (std::size_t i = 0; i < exact.rows(); ++i) {
    for (std::size_t j = 0; j < exact.cols(); ++j) {
      d.max_abs = std::max(d.max_abs, std::abs(exact(i, j) - galerkin(i, j)));
      scale = std::max(scale, std::abs(galerkin(i, j)));
    }
  }
  d.max_rel = scale > 0.0 ? d.max_abs / scale : d.max_abs;
  return d;
}

}  // namespace

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const RunRow& r) {
  out << r.level << ',' << r.iter << ',' << r.slot << ',' << fmt(r.lambda) << ',' << fmt(r.lambda_err) << ','
      << fmt(r.anorm_err) << ',' << fmt(r.contraction) << ',' << fmt(r.seconds) << '\n';
}

RunResult run_pipeline(const RunConfig& cfg, const std::function<void(const RunRow&)>& on_row) {
  const ExampleSpec& spec = cfg.spec;
  const LevelPlan& plan = spec.plan;
  const Hierarchy h = build_hierarchy(plan, spec.geometry, spec.coefficient());

  RunResult res;
  res.coarse_triangles = static_cast<int>(h.coarse_mesh->num_triangles());
  ReferenceOptions ref_opts;
  ref_opts.seed = cfg.seed;
  std::vector<Clusters> clusters;
  for (const auto& level : h.levels) {
    res.n_dof.push_back(level->space->n_dof());
    res.n_triangles.push_back(static_cast<int>(level->mesh->num_triangles()));
    res.references.push_back(reference_eigensolve(level->a, level->b, plan.nev, ref_opts));
    clusters.push_back(resolve_clusters(res.references.back().values, spec.clusters,
                                        static_cast<std::size_t>(plan.nev)));
  }

  double elapsed = 0.0;
  auto observe = [&](const LevelData& level, const EigenState& state) {
    const IterationRecord& rec = state.history.back();
    elapsed += rec.seconds;
    const auto k = static_cast<std::size_t>(level.index - 1);
    const ErrorReport err = measure_errors(state, res.references[k], clusters[k], level.a);
    for (std::size_t s = 0; s < state.slots(); ++s) {
      RunRow row{level.index,          rec.iteration,     static_cast<int>(s) + 1,
                 state.lambdas[s],     err.lambda[s],     err.anorm[s],
                 rec.contraction[s],   cfg.record_time ? elapsed : 0.0};
      res.rows.push_back(row);
      if (on_row) on_row(row);
    }
  };

  res.state = multilevel_solve(h, plan, observe);
  const LevelData& finest = h.finest();
  const EigenPairs& ref = res.references.back();
  auto converged = [&] {
    res.final_lambda_err.clear();
    bool ok = true;
    for (std::size_t s = 0; s < res.state.slots(); ++s) {
      res.final_lambda_err.push_back(std::abs(res.state.lambdas[s] - ref.values[s]));
      ok = ok && res.final_lambda_err.back() < spec.tol_lambda;
    }
    return ok;
  };
  res.finest_iterations = plan.n_levels > 1 ? plan.L : 0;
  res.converged = converged();
  while (!res.converged && finest.aug && res.finest_iterations < cfg.max_finest_iters) {
    res.state = aug_subspace_step(*finest.aug, res.state, plan.theta, finest.index);
    ++res.finest_iterations;
    observe(finest, res.state);
    res.converged = converged();
  }
  return res;
}

int run_example(const RunConfig& cfg, std::ostream& log) {
  std::ofstream csv = open_output(cfg.out_dir, "convergence.csv");
  write_csv_header(csv);
  RunResult res;
  try {
    res = run_pipeline(cfg, [&](const RunRow& row) {
      write_csv_row(csv, row);
      csv.flush();
    });
  } catch (...) {
    csv.flush();
    throw;
  }

  std::ofstream summary = open_output(cfg.out_dir, "summary.txt");
  for (std::ostream* out : {static_cast<std::ostream*>(&summary), &log}) {
    *out << "example " << cfg.spec.name << ", mode " << to_string(cfg.spec.plan.mode) << ", coarse triangles "
         << res.coarse_triangles << '\n';
    for (std::size_t k = 0; k < res.n_dof.size(); ++k)
      *out << "level " << k + 1 << ": triangles " << res.n_triangles[k] << ", dofs " << res.n_dof[k] << '\n';
    *out << "finest-level augmented iterations: " << res.finest_iterations << '\n';
    for (std::size_t s = 0; s < res.final_lambda_err.size(); ++s)
      *out << "slot " << s + 1 << ": lambda " << fmt(res.state.lambdas[s]) << ", reference "
           << fmt(res.references.back().values[s]) << ", |error| " << fmt(res.final_lambda_err[s]) << '\n';
    *out << (res.converged ? "converged" : "not converged") << ": |lambda - reference| < " << cfg.spec.tol_lambda
         << " for all slots\n";
  }
  return res.converged ? 0 : 1;
}

double loglog_slope(const std::vector<TimingPoint>& points) {
  const double n = static_cast<double>(points.size());
  if (points.size() < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double x = std::log(static_cast<double>(p.n_dof));
    const double y = std::log(p.seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TimingStudy timing_study(const RunConfig& cfg, std::ostream& log) {
  if (cfg.sweep.size() < 3) throw ConfigError("timing study needs at least 3 sweep points");
  TimingStudy study;
  std::ofstream csv = open_output(cfg.out_dir, "timing.csv");
  csv << "n_dof,seconds\n";
  for (int n : cfg.sweep) {
    LevelPlan plan = cfg.spec.plan;
    plan.n_levels = n;
    const auto start = std::chrono::steady_clock::now();
    const Hierarchy h = build_hierarchy(plan, cfg.spec.geometry, cfg.spec.coefficient());
    const EigenState state = multilevel_solve(h, plan);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    study.points.push_back({n, h.finest().space->n_dof(), sec});
    csv << study.points.back().n_dof << ',' << fmt(sec) << '\n';
    log << "n_levels " << n << ": n_dof " << study.points.back().n_dof << ", seconds " << fmt(sec) << '\n';
  }
  study.slope = loglog_slope(study.points);
  log << "log-log slope: " << fmt(study.slope) << '\n';
  return study;
}

std::vector<ModeComparison> compare_modes(const RunConfig& cfg, std::ostream& log) {
  const LevelPlan& plan = cfg.spec.plan;
  const Hierarchy h = build_hierarchy(plan, cfg.spec.geometry, cfg.spec.coefficient());
  std::vector<ModeComparison> out;
  for (const auto& level : h.levels) {
    const TransferMatrix p = build_transfer(*h.coarse, *level->space);
    const CrossAssembler galerkin(*h.coarse, *level->space, *h.coeff, level->a, level->b, p.p,
                                  AssemblyMode::galerkin);
    const CrossAssembler exact(*h.coarse, *level->space, *h.coeff, level->a, level->b, p.p, AssemblyMode::exact);
    const CoarseBasis basis = make_coarse_basis(*galerkin.coarse_stiffness(), *galerkin.coarse_mass());
    std::vector<Vector> u;
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(plan.nev), basis.values.size());
    for (std::size_t j = 0; j < m; ++j) {
      Vector v = spmv(p.p, basis.z.column(j));
      scale(v, 1.0 / energy_norm(level->a, v));
      u.push_back(std::move(v));
    }
    const BorderedSystem g = galerkin.assemble(u);
    const BorderedSystem e = exact.assemble(u);
    ModeComparison c{level->index, level->space->n_dof(), diff(*e.a_coarse, *g.a_coarse),
                     diff(*e.b_coarse, *g.b_coarse), diff(e.a_border, g.a_border), diff(e.b_border, g.b_border)};
    log << "level " << c.level << " (" << c.n_dof << " dofs): max relative entry difference A_H "
        << fmt(c.a_coarse.max_rel) << ", B_H " << fmt(c.b_coarse.max_rel) << ", a_h " << fmt(c.a_border.max_rel)
        << ", b_h " << fmt(c.b_border.max_rel) << '\n';
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> generate_meshes(const RunConfig& cfg) {
  const LevelPlan& plan = cfg.spec.plan;
  plan.validate();
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::string> paths;
  auto emit = [&](const Mesh& mesh, const std::string& name) {
    const std::string path = (std::filesystem::path(cfg.out_dir) / name).string();
    write_mesh(mesh, path);
    paths.push_back(path);
  };
  emit(build_mesh(cfg.spec.geometry, plan.coarse_h), "coarse.mesh");
  for (int k = 1; k <= plan.n_levels; ++k)
    emit(build_mesh(cfg.spec.geometry, plan.fine_h(k)), "level" + std::to_string(k) + ".mesh");
  return paths;
}

}  // namespace ifeig

namespace ifeig {

ContractionStudy contraction_study(const ExampleSpec& spec, double coarse_h, double fine_h, int nev, int measured,
                                   int steps, std::uint64_t seed) {
  if (measured < 1 || measured > nev) throw PreconditionError("contraction_study: need 1 <= measured <= nev");
  const LevelPlan& plan = spec.plan;
  const Coefficient coeff = spec.coefficient();
  const auto coarse_mesh = std::make_shared<const Mesh>(build_mesh(spec.geometry, coarse_h));
  const auto fine_mesh = std::make_shared<const Mesh>(build_mesh(spec.geometry, fine_h));
  const FeSpace coarse(coarse_mesh), fine(fine_mesh);
  const SparseMatrix a = assemble_stiffness(fine, coeff);
  const SparseMatrix b = assemble_mass(fine);
  const TransferMatrix p = build_transfer(coarse, fine);
  const AugContext ctx(coarse, fine, coeff, a, b, p.p, plan.mode, plan.precond);

  // Tighter than the default so the error floor sits below kSaturationFloor.
  ReferenceOptions opts;
  opts.seed = seed;
  opts.tol = 1e-13;
  opts.residual_tol = 1e-11;
  const EigenPairs ref = reference_eigensolve(a, b, nev, opts);
  const Clusters clusters = resolve_clusters(ref.values, spec.clusters, static_cast<std::size_t>(nev));

  EigenState state;
  const CoarseBasis& basis = ctx.coarse_basis();
  for (int j = 0; j < nev; ++j) {
    Vector u = spmv(p.p, basis.z.column(static_cast<std::size_t>(j)));
    scale(u, 1.0 / energy_norm(a, u));
    fix_sign(u);
    state.lambdas.push_back(basis.values[static_cast<std::size_t>(j)]);
    state.vectors.push_back(std::move(u));
  }

  ContractionStudy out;
  out.coarse_triangles = coarse_mesh->num_triangles();
  out.fine_triangles = fine_mesh->num_triangles();
  auto record = [&] {
    const ErrorReport err = measure_errors(state, ref, clusters, a);
    double sum = 0.0, lam = 0.0;
    for (std::size_t s = 0; s < static_cast<std::size_t>(measured); ++s) {
      sum += err.anorm[s];
      lam = std::max(lam, err.lambda[s]);
    }
    out.errors.push_back(sum);
    out.lambda_errors.push_back(lam);
  };
  record();
  for (int l = 0; l < steps; ++l) {
    state = aug_subspace_step(ctx, state, plan.theta);
    record();
    out.ratios.push_back(out.errors[l + 1] / out.errors[l]);
  }
  double log_sum = 0.0;
  while (out.pre_saturation < steps && out.errors[static_cast<std::size_t>(out.pre_saturation) + 1] > kSaturationFloor) {
    log_sum += std::log(out.ratios[static_cast<std::size_t>(out.pre_saturation)]);
    ++out.pre_saturation;
  }
  out.mean_contraction = out.pre_saturation > 0 ? std::exp(log_sum / out.pre_saturation) : 0.0;
  return out;
}

}  // namespace ifeig
