// Command-line front end: solve a preset, check a kernel truncation, list presets.

#include "mfg/error.hpp"
#include "mfg/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int cmd_solve(std::string const &path, std::string const &out, long max_iters, double tol, bool dry)
{
  mfg::RunConfig cfg = mfg::load_config(path);
  if (!out.empty()) cfg.output_dir = out;
  if (max_iters > 0) cfg.max_iters = max_iters;
  if (tol > 0.0) cfg.tol = tol;

  if (dry) {
    mfg::run(cfg, {.dry_run = true});
    std::cout << mfg::serialize_config(cfg);
    return 0;
  }
  mfg::RunOptions opts;
  opts.on_history = [](mfg::HistoryRow const &h) {
    std::printf("iter %7ld  continuity %.3e  a_fixedpoint %.3e  complementarity %.3e\n", h.iteration,
                h.res.continuity, h.res.a_fixedpoint, h.res.complementarity);
  };
  mfg::RunSummary const s = mfg::run(cfg, opts);
  std::printf("%s after %ld iterations; artifacts in %s\n", s.converged ? "converged" : "NOT converged", s.iterations,
              cfg.output_dir.c_str());
  return s.converged ? 0 : 2;
}

int cmd_kernel_check(std::string const &path, int samples)
{
  mfg::RunConfig const cfg = mfg::load_config(path);
  mfg::KernelCheck const k = mfg::kernel_check(cfg, samples);
  std::printf("preset %s, reference %s, %dx%d sample grid\n", k.family.c_str(), k.reference.c_str(), samples,
              samples);
  std::printf("%6s %9s %14s\n", "order", "features", "sup_error");
  for (auto const &r : k.rows) std::printf("%6d %9d %14.6e\n", r.order, r.features, r.sup_error);
  return 0;
}

int cmd_presets()
{
  for (auto const &p : mfg::preset_catalog()) {
    std::printf("%-14s %s\n", p.name.c_str(), p.summary.c_str());
    std::printf("%-14s defaults %s\n", "", p.defaults.dump().c_str());
    auto const &t = p.recommended;
    std::printf("%-14s steps    tau_rho=%g tau_m=%g tau_a=%g tau_phi_t=%g tau_grad_phi=%g tau_phi0=%g\n", "",
                t.tau_rho, t.tau_m, t.tau_a, t.tau_phi_t, t.tau_grad_phi, t.tau_phi0);
  }
  return 0;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Nonlocal mean-field game solver (feature-basis kernels, preconditioned PDHG)"};
  app.require_subcommand(1);

  std::string config, out;
  long max_iters = 0;
  double tol = 0.0;
  bool dry = false;
  auto *solve = app.add_subcommand("solve", "solve the configured problem and write artifacts");
  solve->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out, "output directory (overrides output_dir)");
  solve->add_option("--max-iters", max_iters, "iteration cap (overrides max_iters)")->check(CLI::PositiveNumber);
  solve->add_option("--tol", tol, "stopping tolerance (overrides tol)")->check(CLI::PositiveNumber);
  solve->add_flag("--dry-run", dry, "validate and echo the canonical config, do not solve");

  std::string kconfig;
  int samples = 17;
  auto *kcheck = app.add_subcommand("kernel-check", "truncated vs exact kernel error table");
  kcheck->add_option("--config", kconfig, "JSON run configuration")->required()->check(CLI::ExistingFile);
  kcheck->add_option("--samples", samples, "sampling grid points per axis")->check(CLI::Range(2, 129));

  auto *presets = app.add_subcommand("presets", "list presets and their default parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(config, out, max_iters, tol, dry);
    if (*kcheck) return cmd_kernel_check(kconfig, samples);
    if (*presets) return cmd_presets();
  } catch (mfg::ConfigError const &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (mfg::DivergenceError const &e) {
    std::fprintf(stderr, "diverged: %s (iterate %s)\n", e.what(), e.iterate().c_str());
    return 3;
  } catch (std::exception const &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
