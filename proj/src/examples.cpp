#include "ifeig/examples.hpp"

#include <algorithm>
#include <set>

#include "ifeig/error.hpp"

namespace ifeig {

Coefficient ExampleSpec::coefficient() const {
  std::vector<double> k{background_k};
  k.insert(k.end(), circle_k.begin(), circle_k.end());
  return Coefficient(std::move(k));
}

void ExampleSpec::validate() const {
  if (!(background_k > 0.0)) throw PreconditionError("background coefficient must be positive");
  if (circle_k.size() != geometry.circles.size())
    throw PreconditionError("need one coefficient per circle");
  for (double k : circle_k)
    if (!(k > 0.0)) throw PreconditionError("circle coefficients must be positive");
  for (const auto& c : geometry.circles)
    if (!(c.radius > 0.0)) throw PreconditionError("circle radius must be positive");
  if (!(tol_lambda > 0.0)) throw PreconditionError("tol_lambda must be positive");
  std::set<int> seen;
  for (const auto& cl : clusters) {
    if (cl.empty() || !std::is_sorted(cl.begin(), cl.end()))
      throw PreconditionError("clusters must be non-empty sorted index lists");
    for (int i : cl)
      if (i < 0 || !seen.insert(i).second) throw PreconditionError("clusters must be disjoint");
  }
}

namespace {

ExampleSpec square_base(std::string name) {
  ExampleSpec s;
  s.name = std::move(name);
  s.geometry.domain = {0.0, 0.0, 2.0, 2.0};
  s.plan.beta = 2.0;
  s.plan.L = 2;
  s.plan.theta = 0.1;
  s.plan.mode = AssemblyMode::galerkin;
  return s;
}

}  // namespace

ExampleSpec example1() {
  ExampleSpec s = square_base("example1");
  const double r = 1.0 / 3.0;
  s.geometry.circles = {{{2.0 / 3.0, 1.0}, r}, {{4.0 / 3.0, 1.0}, r}};
  s.circle_k = {10.0, 10.0};
  s.clusters = {{1, 2}};
  s.tol_lambda = 1e-9;
  s.plan.coarse_h = 2.0 / 17.0;
  s.plan.h1 = 1.0 / 18.0;
  s.plan.n_levels = 3;
  s.plan.nev = 4;
  return s;
}

ExampleSpec example2() {
  ExampleSpec s = square_base("example2");
  for (double cy : {0.5, 1.5})
    for (double cx : {0.5, 1.5}) s.geometry.circles.push_back({{cx, cy}, 0.25});
  s.circle_k = {10.0, 10.0, 10.0, 10.0};
  s.tol_lambda = 1e-8;
  s.plan.coarse_h = 2.0 / 17.0;
  s.plan.h1 = 1.0 / 18.0;
  s.plan.n_levels = 3;
  s.plan.nev = 4;
  return s;
}

ExampleSpec unit_square() {
  ExampleSpec s = square_base("unit_square");
  s.clusters = {{1, 2}};
  s.tol_lambda = 1e-9;
  s.plan.coarse_h = 0.25;
  s.plan.h1 = 1.0 / 16.0;
  s.plan.n_levels = 3;
  s.plan.nev = 3;
  return s;
}

ExampleSpec example_by_name(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "unit_square") return unit_square();
  throw PreconditionError("unknown example '" + name + "'");
}

}  // namespace ifeig
