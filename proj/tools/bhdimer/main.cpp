// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "bhdimer/fock/steady_state.hpp"
#include "bhdimer/spectra/eigen.hpp"
#include "bhdimer/spectra/liouvillian.hpp"
#include "commands.hpp"
#include "run_context.hpp"

namespace {

int report(const std::string& kind, const std::string& message, int code, nlohmann::json extra = nlohmann::json::object(),
           const bhd::cli::RunContext* ctx = nullptr) {
  nlohmann::json e = {{"error", kind}, {"message", message}, {"exit_code", code}};
  for (auto it = extra.begin(); it != extra.end(); ++it) e[it.key()] = it.value();
  if (ctx) {
    e["run_dir"] = ctx->dir().string();
    std::ofstream f(ctx->dir() / "error.json");
    f << e.dump(2) << '\n';
  }
  std::cerr << e.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bhd::cli;
  CLI::App app{"Mean-field, quantum and spectral analysis of a driven-dissipative Bose-Hubbard dimer", "bhdimer"};
  app.set_config("--config", "", "configuration file (TOML/INI)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  GlobalOptions g;
  auto& p = g.params;
  app.add_option("--delta", p.delta, "detuning")->capture_default_str();
  app.add_option("--j-coupling,--j_coupling", p.j_coupling, "inter-site hopping")->capture_default_str();
  app.add_option("--u-tilde,--u_tilde", p.u_tilde, "rescaled interaction U N")->capture_default_str();
  app.add_option("--f-tilde,--f_tilde", p.f_tilde, "rescaled drive F / sqrt(N)")->capture_default_str();
  app.add_option("--gamma", p.gamma, "collective loss rate")->capture_default_str();
  app.add_option("--kappa", p.kappa, "local loss rate per site")->capture_default_str();
  app.add_option("--n-scale,--n_scale", p.n_scale, "scaling parameter N")->capture_default_str();
  app.add_option("--twa-noise,--twa_noise", g.twa_noise)->capture_default_str()->check(
      CLI::IsMember({"independent", "collective"}));
  app.add_option("--seed", g.seed)->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads; 0 uses BHDIMER_THREADS or all cores")->capture_default_str();
  app.add_option("--out", g.out, "output root")->capture_default_str();
  app.add_option("--run-name,--run_name", g.run_name, "run directory name instead of <subcommand>-<timestamp>");

  std::vector<Command> commands;
  add_sweep(app, commands);
  add_portrait(app, commands);
  add_fixed_points(app, commands);
  add_evolve(app, commands);
  add_spectrum(app, commands);
  add_g2(app, commands);
  add_fft(app, commands);
  for (auto& c : commands) c.app->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), e.get_exit_code() != 0 ? e.get_exit_code() : 2);
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands)
    if (c.app->parsed()) chosen = &c;
  if (!chosen) return report("usage", "no subcommand given", 2);

  try {
    g.params.validate();
  } catch (const std::exception& e) {
    return report("invalid_parameters", e.what(), 2);
  }

  std::optional<RunContext> ctx;
  try {
    ctx.emplace(chosen->app->get_name(), g);
    chosen->run(*ctx);
    ctx->finish();
    std::cout << ctx->dir().string() << '\n';
    return 0;
  } catch (const bhd::spectra::MemoryCapExceeded& e) {
    return report("memory_cap", e.what(), 3,
                  {{"required_dimension", e.required_dimension()}, {"estimated_bytes", e.estimated_bytes()}},
                  ctx ? &*ctx : nullptr);
  } catch (const bhd::fock::DegenerateSteadyState& e) {
    return report("degenerate_steady_state", e.what(), 4, nlohmann::json::object(), ctx ? &*ctx : nullptr);
  } catch (const bhd::spectra::EigenSolveError& e) {
    return report("eigensolver", e.what(), 5, {{"achieved_residual", e.achieved_residual()}}, ctx ? &*ctx : nullptr);
  } catch (const std::invalid_argument& e) {
    return report("invalid_argument", e.what(), 2, nlohmann::json::object(), ctx ? &*ctx : nullptr);
  } catch (const std::exception& e) {
    return report("runtime", e.what(), 1, nlohmann::json::object(), ctx ? &*ctx : nullptr);
  }
}
