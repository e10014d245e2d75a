// Command-line front end: solve single problems, run the study sweeps, and
// expose the two correctness gates (kernel derivative checks and the
// Green's identity reconstruction) as first-class subcommands.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exhelm/exhelm.hpp"

namespace {

using namespace exhelm;

struct CommonOpts {
  std::string geometry = "annulus";
  double kappa = 1.0;
  int degree = 1;
  std::string bc = "nonlocal";
  std::string pc = "direct";
  double rtol = 1e-12;
  int restart = 200;
  int maxit = 20000;
  int q = 8;
  bool matrix_free = false;
  // geometry parameters
  double r_inner = 1.0, r_outer = 3.0;
  int n_radial = 24, n_angular = 64;
  double a_half = 1.0, b_half = 2.0;
  int n = 16;
  double side = 4.0;
  std::string mesh_file;
  std::string output;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--geometry", o.geometry, "Geometry: annulus, square-frame, square-hole, gmsh")
      ->capture_default_str();
  cmd->add_option("--kappa", o.kappa, "Wave number")->capture_default_str();
  cmd->add_option("--degree", o.degree, "Polynomial degree")->capture_default_str();
  cmd->add_option("--bc", o.bc, "Truncation condition: nonlocal or transmission")
      ->capture_default_str();
  cmd->add_option("--pc", o.pc, "Preconditioner: none, ilu0, direct")->capture_default_str();
  cmd->add_option("--rtol", o.rtol, "GMRES relative tolerance")->capture_default_str();
  cmd->add_option("--restart", o.restart, "GMRES restart length")->capture_default_str();
  cmd->add_option("--maxit", o.maxit, "GMRES iteration cap")->capture_default_str();
  cmd->add_option("--q", o.q, "Boundary quadrature points per facet")->capture_default_str();
  cmd->add_flag("--matrix-free", o.matrix_free,
                "Apply the nonlocal operator without caching kernel values");
  cmd->add_option("--r-inner", o.r_inner, "Annulus inner radius")->capture_default_str();
  cmd->add_option("--r-outer", o.r_outer, "Annulus outer radius")->capture_default_str();
  cmd->add_option("--n-radial", o.n_radial, "Radial cell count")->capture_default_str();
  cmd->add_option("--n-angular", o.n_angular, "Angular cell count")->capture_default_str();
  cmd->add_option("--a-half", o.a_half, "Square-frame hole half-width")->capture_default_str();
  cmd->add_option("--b-half", o.b_half, "Square-frame outer half-width")->capture_default_str();
  cmd->add_option("--n", o.n, "Square-frame cells per side")->capture_default_str();
  cmd->add_option("--side", o.side, "Square-hole outer side length")->capture_default_str();
  cmd->add_option("--mesh-file", o.mesh_file, "Gmsh MSH 2.2 mesh path");
  cmd->add_option("-o,--output", o.output, "CSV output path (default: CSV to stdout)");
  cmd->add_option("--jobs", o.jobs, "Worker threads for studies")->capture_default_str();
}

int validate_and_fill(const CommonOpts& o, ProblemSpec& spec, std::string& err) {
  if (o.degree != 1 && o.degree != 2) {
    err = "unsupported degree " + std::to_string(o.degree) + "; supported degrees are 1 and 2";
    return 2;
  }
  if (o.geometry == "annulus") {
    spec.geometry.kind = GeometrySpec::Kind::annulus;
  } else if (o.geometry == "square-frame") {
    spec.geometry.kind = GeometrySpec::Kind::square_frame;
  } else if (o.geometry == "square-hole") {
    spec.geometry.kind = GeometrySpec::Kind::square_hole;
  } else if (o.geometry == "gmsh") {
    spec.geometry.kind = GeometrySpec::Kind::gmsh_file;
    if (o.mesh_file.empty()) {
      err = "--geometry gmsh requires --mesh-file";
      return 2;
    }
  } else {
    err = "unknown geometry '" + o.geometry + "'";
    return 2;
  }
  if (o.bc == "nonlocal")
    spec.bc = Bc::nonlocal;
  else if (o.bc == "transmission")
    spec.bc = Bc::transmission;
  else {
    err = "unknown bc '" + o.bc + "'";
    return 2;
  }
  if (o.pc == "none")
    spec.pc = Pc::none;
  else if (o.pc == "ilu0")
    spec.pc = Pc::ilu0;
  else if (o.pc == "direct")
    spec.pc = Pc::direct;
  else {
    err = "unknown pc '" + o.pc + "'";
    return 2;
  }
  spec.geometry.r_inner = o.r_inner;
  spec.geometry.r_outer = o.r_outer;
  spec.geometry.n_radial = o.n_radial;
  spec.geometry.n_angular = o.n_angular;
  spec.geometry.a_half = o.a_half;
  spec.geometry.b_half = o.b_half;
  spec.geometry.n = o.n;
  spec.geometry.side = o.side;
  spec.geometry.path = o.mesh_file;
  spec.kappa = o.kappa;
  spec.degree = o.degree;
  spec.rtol = o.rtol;
  spec.restart = o.restart;
  spec.maxit = o.maxit;
  spec.quadrature_order = o.q;
  spec.nonlocal_mode = o.matrix_free ? NonlocalMode::matrix_free : NonlocalMode::explicit_dense;
  return 0;
}

void emit(const CommonOpts& o, const std::vector<ExperimentRow>& rows) {
  if (!o.output.empty()) {
    std::ofstream out(o.output, std::ios::binary);
    write_csv(out, rows);
    std::printf("wrote %zu row%s to %s\n", rows.size(), rows.size() == 1 ? "" : "s",
                o.output.c_str());
  } else {
    write_csv(std::cout, rows);
  }
}

int all_converged(const std::vector<ExperimentRow>& rows) {
  for (const auto& r : rows)
    if (!r.converged) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exterior Helmholtz solver with an exact nonlocal truncation boundary condition"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one problem and report errors");
  add_common(solve_cmd, o);

  auto* conv_cmd =
      app.add_subcommand("study-convergence", "Error under uniform mesh refinement");
  add_common(conv_cmd, o);
  int levels = 4;
  conv_cmd->add_option("--levels", levels, "Refinement levels")->capture_default_str();

  auto* iter_cmd =
      app.add_subcommand("study-iterations", "GMRES iteration counts over kappa/mesh/pc");
  add_common(iter_cmd, o);
  int iter_levels = 3;
  std::vector<double> kappa_list{0.1, 1.0, 5.0, 10.0};
  std::vector<std::string> pc_list{"direct", "none"};
  iter_cmd->add_option("--levels", iter_levels, "Refinement levels")->capture_default_str();
  iter_cmd->add_option("--kappa-list", kappa_list, "Wave numbers to sweep")
      ->capture_default_str();
  iter_cmd->add_option("--pc-list", pc_list, "Preconditioners to sweep")->capture_default_str();

  auto* dom_cmd = app.add_subcommand("study-domain",
                                     "Accuracy as the truncation boundary approaches the scatterer");
  add_common(dom_cmd, o);
  std::vector<double> sides{2.25, 2.5, 3.0, 4.0, 5.0, 6.0};
  double target_h = 0.1;
  dom_cmd->add_option("--sides", sides, "Outer square side lengths")->capture_default_str();
  dom_cmd->add_option("--target-h", target_h, "Target mesh size")->capture_default_str();

  auto* greens_cmd = app.add_subcommand(
      "check-greens", "Reconstruct the manufactured field from its Cauchy data on Gamma");
  double g_kappa = 1.0;
  int g_nang = 256, g_q = 16;
  bool g_physical = false;
  greens_cmd->add_option("--kappa", g_kappa, "Wave number")->capture_default_str();
  greens_cmd->add_option("--n-angular", g_nang, "Gamma facets")->capture_default_str();
  greens_cmd->add_option("--q", g_q, "Quadrature points per facet")->capture_default_str();
  greens_cmd->add_flag("--physical-traces", g_physical,
                       "Sample Neumann data with the disc normal instead of the facet normal");

  auto* kern_cmd = app.add_subcommand(
      "check-kernels", "Validate kernel derivative formulas against finite differences");
  std::uint64_t seed = 20240901;
  int trials = 50;
  double k_kappa = 1.0;
  kern_cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  kern_cmd->add_option("--trials", trials, "Random configurations")->capture_default_str();
  kern_cmd->add_option("--kappa", k_kappa, "Wave number")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed() || conv_cmd->parsed() || iter_cmd->parsed() || dom_cmd->parsed()) {
      ProblemSpec spec;
      std::string err;
      if (const int code = validate_and_fill(o, spec, err)) {
        std::fprintf(stderr, "error: %s\n", err.c_str());
        return code;
      }
      std::vector<ExperimentRow> rows;
      if (solve_cmd->parsed()) {
        const auto res = solve_problem(spec);
        std::printf("%s kappa=%g degree=%d bc=%s pc=%s\n", spec.geometry.label().c_str(),
                    spec.kappa, spec.degree, to_string(spec.bc), to_string(spec.pc));
        std::printf("h=%.6g ndofs=%d rel_l2=%.6e rel_h1=%.6e iterations=%d converged=%s\n",
                    res.row.h, res.row.ndofs, res.row.rel_l2_error, res.row.rel_h1_error,
                    res.row.iterations, res.row.converged ? "true" : "false");
        rows.push_back(res.row);
      } else if (conv_cmd->parsed()) {
        rows = run_convergence_study(spec, levels, o.jobs);
      } else if (iter_cmd->parsed()) {
        std::vector<Pc> pcs;
        for (const auto& p : pc_list) {
          if (p == "none")
            pcs.push_back(Pc::none);
          else if (p == "ilu0")
            pcs.push_back(Pc::ilu0);
          else if (p == "direct")
            pcs.push_back(Pc::direct);
          else {
            std::fprintf(stderr, "error: unknown pc '%s'\n", p.c_str());
            return 2;
          }
        }
        rows = run_iteration_study(spec, kappa_list, iter_levels, pcs, o.jobs);
      } else {
        rows = run_domain_study(spec, sides, target_h, o.jobs);
      }
      emit(o, rows);
      return all_converged(rows);
    }

    if (greens_cmd->parsed()) {
      const double err = greens_identity_error(g_kappa, g_nang, g_q, g_physical);
      std::printf("greens identity max error at 8 probes: %.6e (threshold 1e-6)\n", err);
      return err <= 1e-6 ? 0 : 1;
    }

    if (kern_cmd->parsed()) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
      std::uniform_real_distribution<double> rsrc(0.6, 1.2), rtgt(2.2, 3.5);
      const KernelParams params(k_kappa);
      const double step = 1e-6;
      double dev_grad = 0, dev_dny = 0, dev_tilde = 0, dev_rhs = 0;
      for (int t = 0; t < trials; ++t) {
        const double a1 = angle(rng), a2 = angle(rng), a3 = angle(rng), a4 = angle(rng);
        const Vec2 x = rtgt(rng) * Vec2{std::cos(a1), std::sin(a1)};
        const Vec2 y = rsrc(rng) * Vec2{std::cos(a2), std::sin(a2)};
        const Vec2 nx{std::cos(a3), std::sin(a3)};
        const Vec2 ny{std::cos(a4), std::sin(a4)};
        // gradient of K against central differences in both coordinates
        const Complex fdx =
            (kernel_K(x + Vec2{step, 0}, y, params) - kernel_K(x - Vec2{step, 0}, y, params)) /
            (2 * step);
        const Complex fdy =
            (kernel_K(x + Vec2{0, step}, y, params) - kernel_K(x - Vec2{0, step}, y, params)) /
            (2 * step);
        const Complex gK =
            (Complex(0, k_kappa) * kernel_K(x, y, params) - kernel_rhs(x, y, nx, params));
        dev_rhs = std::max(dev_rhs, std::abs(gK - (fdx * nx.x + fdy * nx.y)));
        const Complex fdny =
            (kernel_K(x, y + step * ny, params) - kernel_K(x, y - step * ny, params)) /
            (2 * step);
        dev_dny = std::max(dev_dny, std::abs(fdny - kernel_dK_dny(x, y, ny, params)));
        const Complex fdnx = (kernel_dK_dny(x + step * nx, y, ny, params) -
                              kernel_dK_dny(x - step * nx, y, ny, params)) /
                             (2 * step);
        const Complex tilde_dn =
            Complex(0, k_kappa) * kernel_dK_dny(x, y, ny, params) -
            kernel_Ktilde(x, y, nx, ny, params);
        dev_tilde = std::max(dev_tilde, std::abs(fdnx - tilde_dn));
        // full gradient magnitude check of K via radial symmetry
        const double r = dist(x, y);
        const Complex dr = (kernel_K(Vec2{r + step, 0}, Vec2{0, 0}, params) -
                            kernel_K(Vec2{r - step, 0}, Vec2{0, 0}, params)) /
                           (2 * step);
        const Vec2 u = (x - y) / r;
        dev_grad = std::max(dev_grad, std::abs((fdx * u.x + fdy * u.y) - dr));
      }
      std::printf("max |finite difference - formula| over %d trials:\n", trials);
      std::printf("  grad K (radial)   %.3e\n", dev_grad);
      std::printf("  dK/dn_y           %.3e\n", dev_dny);
      std::printf("  d(dK/dn_y)/dn_x   %.3e\n", dev_tilde);
      std::printf("  d K/dn_x (rhs)    %.3e\n", dev_rhs);
      const double worst = std::max(std::max(dev_grad, dev_dny), std::max(dev_tilde, dev_rhs));
      std::printf("worst: %.3e (threshold 1e-6)\n", worst);
      return worst <= 1e-6 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
