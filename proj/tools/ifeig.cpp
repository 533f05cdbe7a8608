#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "ifeig/config.hpp"
#include "ifeig/error.hpp"
#include "ifeig/mesh_io.hpp"
#include "ifeig/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

ifeig::RunConfig load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  ifeig::RunConfig cfg = ifeig::load_config(path);
  if (seed) {
    cfg.seed = *seed;
    cfg.spec.plan.seed = *seed;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented subspace multilevel eigensolver for elliptic interface problems"};
  app.name("ifeig");
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the random seed of the config");
  app.fallthrough();

  std::string config;
  auto* generate = app.add_subcommand("generate", "Write mesh files");
  generate->add_option("--config", config, "Config file; writes the coarse and every level mesh to out_dir");
  std::string example;
  std::string h_text;
  std::string out_path;
  generate->add_option("--example", example, "Example name (example1, example2, unit_square)");
  generate->add_option("--mesh-size", h_text, "Mesh size, e.g. 1/16");
  generate->add_option("--out", out_path, "Output mesh file");

  auto* solve = app.add_subcommand("solve", "Run the multilevel solve and write the convergence CSV");
  solve->add_option("--config", config, "Config file")->required();
  auto* bench = app.add_subcommand("bench", "Timing study over the config's sweep of level counts");
  bench->add_option("--config", config, "Config file")->required();
  auto* compare = app.add_subcommand("compare", "Exact versus galerkin cross-assembly differences");
  compare->add_option("--config", config, "Config file")->required();

  if (argc <= 1) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::cout << app.help();
      return kExitOk;
    }
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (generate->parsed()) {
      if (!config.empty()) {
        for (const auto& p : ifeig::generate_meshes(load(config, seed))) std::cout << p << '\n';
        return kExitOk;
      }
      if (example.empty() || h_text.empty() || out_path.empty()) {
        std::cerr << "error: generate needs --config, or --example with --mesh-size and --out\n\n" << generate->help();
        return kExitUsage;
      }
      const ifeig::ExampleSpec spec = ifeig::example_by_name(example);
      double h = 0.0;
      try {
        h = ifeig::parse_real(h_text);
      } catch (const std::invalid_argument& e) {
        throw ifeig::ConfigError(std::string("--mesh-size: ") + e.what());
      }
      ifeig::write_mesh(ifeig::build_mesh(spec.geometry, h), out_path);
      std::cout << out_path << '\n';
      return kExitOk;
    }
    if (solve->parsed()) return ifeig::run_example(load(config, seed), std::cout);
    if (bench->parsed()) {
      ifeig::timing_study(load(config, seed), std::cout);
      return kExitOk;
    }
    if (compare->parsed()) {
      ifeig::compare_modes(load(config, seed), std::cout);
      return kExitOk;
    }
  } catch (const ifeig::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ifeig::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ifeig::PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ifeig::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ifeig::NumericalError& e) {
    std::cerr << "numerical breakdown: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
