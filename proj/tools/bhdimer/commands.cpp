// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "bhdimer/analysis/fourier.hpp"
#include "bhdimer/core/csv.hpp"
#include "bhdimer/core/grid.hpp"
#include "bhdimer/correlations/g2.hpp"
#include "bhdimer/fock/jumps.hpp"
#include "bhdimer/fock/master.hpp"
#include "bhdimer/fock/steady_state.hpp"
#include "bhdimer/semiclassical/mean_field.hpp"
#include "bhdimer/semiclassical/sweep.hpp"
#include "bhdimer/spectra/spectrum.hpp"
#include "bhdimer/twa/twa.hpp"

namespace bhd::cli {

namespace {

struct FGrid {
  double f_min = 0.0;
  double f_max = -1.0;
  double f_step = 0.01;

  void add(CLI::App* sub, double default_step) {
    f_step = default_step;
    sub->add_option("--f-min,--f_min", f_min, "first drive value of the scan")->capture_default_str();
    sub->add_option("--f-max,--f_max", f_max, "last drive value; scan disabled when below f-min");
    sub->add_option("--f-step,--f_step", f_step, "scan step")->capture_default_str()->check(CLI::PositiveNumber);
  }

  std::vector<double> values(double fallback) const {
    if (f_max < f_min) return {fallback};
    return uniform_grid(f_min, f_max, f_step);
  }
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json optional_json(const std::optional<cplx>& z) { return z ? complex_json(*z) : json(nullptr); }

void field_opt(CsvWriter& w, const std::optional<cplx>& z) {
  w.field(z ? z->real() : std::nan(""));
  w.field(z ? z->imag() : std::nan(""));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void add_sweep(CLI::App& app, std::vector<Command>& out) {
  auto* sub = app.add_subcommand("sweep", "order-parameter sweep over the drive");
  auto o = std::make_shared<semiclassical::SweepOptions>();
  auto grid = std::make_shared<FGrid>();
  auto stride = std::make_shared<int>(10);
  grid->add(sub, 0.01);
  sub->add_option("--n-ic,--n_ic", o->n_ic, "random initial conditions per drive value")->capture_default_str();
  sub->add_option("--t-transient,--t_transient", o->t_transient, "discarded transient")->capture_default_str();
  sub->add_option("--t-sample,--t_sample", o->t_sample, "sampled window after the transient")->capture_default_str();
  sub->add_option("--sample-interval,--sample_interval", o->sample_interval)->capture_default_str();
  sub->add_option("--ic-max-amplitude,--ic_max_amplitude", o->ic_max_amplitude)->capture_default_str();
  sub->add_option("--stride", *stride, "write every n-th sample")->capture_default_str()->check(CLI::PositiveNumber);
  out.push_back({sub, [o, grid, stride](RunContext& ctx) {
                   auto opt = *o;
                   opt.seed = ctx.globals().seed;
                   opt.threads = ctx.threads();
                   const auto fs = grid->values(ctx.globals().params.f_tilde);
                   const auto res = semiclassical::order_parameter_sweep(ctx.globals().params, fs, opt);
                   ctx.settings() = {{"f_values", fs},          {"n_ic", opt.n_ic},
                                     {"t_transient", opt.t_transient}, {"t_sample", opt.t_sample},
                                     {"sample_interval", opt.sample_interval}, {"stride", *stride}};
                   CsvWriter w(ctx.output("sweep.csv"), {"f_tilde", "ic", "t", "abs_alpha_b", "abs_alpha_a"});
                   std::size_t k = 0;
                   for (const auto& s : res.samples) {
                     if (k++ % static_cast<std::size_t>(*stride) != 0) continue;
                     w.field(s.f_tilde).field(s.ic_index).field(s.t).field(s.abs_alpha_b).field(s.abs_alpha_a);
                     w.end_row();
                   }
                   CsvWriter fw(ctx.output("failures.csv"), {"f_tilde", "ic", "time", "message"});
                   for (const auto& f : res.failures) {
                     fw.field(f.f_tilde).field(f.ic_index).field(f.time).field(f.message);
                     fw.end_row();
                   }
                   ctx.results()["n_failures"] = res.failures.size();
                 }});
}

void add_portrait(CLI::App& app, std::vector<Command>& out) {
  auto* sub = app.add_subcommand("portrait", "phase portraits of the bonding and antibonding amplitudes");
  auto o = std::make_shared<semiclassical::SweepOptions>();
  o->n_ic = 20;
  sub->add_option("--n-ic,--n_ic", o->n_ic)->capture_default_str();
  sub->add_option("--t-transient,--t_transient", o->t_transient)->capture_default_str();
  sub->add_option("--t-sample,--t_sample", o->t_sample)->capture_default_str();
  sub->add_option("--sample-interval,--sample_interval", o->sample_interval)->capture_default_str();
  sub->add_option("--ic-max-amplitude,--ic_max_amplitude", o->ic_max_amplitude)->capture_default_str();
  out.push_back({sub, [o](RunContext& ctx) {
                   auto opt = *o;
                   opt.seed = ctx.globals().seed;
                   opt.threads = ctx.threads();
                   const auto res = semiclassical::phase_portrait(ctx.globals().params, opt);
                   ctx.settings() = {{"n_ic", opt.n_ic}, {"t_transient", opt.t_transient}, {"t_sample", opt.t_sample},
                                     {"sample_interval", opt.sample_interval}};
                   CsvWriter w(ctx.output("portrait.csv"), {"ic", "t", "re_alpha_b", "im_alpha_b", "re_alpha_a", "im_alpha_a"});
                   for (const auto& pt : res.points) {
                     w.field(pt.ic_index).field(pt.t);
                     w.field(pt.state.alpha_b.real()).field(pt.state.alpha_b.imag());
                     w.field(pt.state.alpha_a.real()).field(pt.state.alpha_a.imag());
                     w.end_row();
                   }
                   ctx.results()["n_failures"] = res.failures.size();
                 }});
}

void add_fixed_points(CLI::App& app, std::vector<Command>& out) {
  auto* sub = app.add_subcommand("fixed-points", "fixed points, their stability and the instability window");
  auto grid = std::make_shared<FGrid>();
  auto ro = std::make_shared<semiclassical::RootSearchOptions>();
  grid->add(sub, 0.01);
  sub->add_option("--n-starts,--n_starts", ro->n_starts, "Newton starts for symmetry-breaking roots")->capture_default_str();
  out.push_back({sub, [grid, ro](RunContext& ctx) {
                   const DimerParams& p = ctx.globals().params;
                   auto opt = *ro;
                   opt.seed = ctx.globals().seed;
                   json j;
                   const auto window = semiclassical::instability_window(p);
                   j["window"] = window ? json::array({window->first, window->second}) : json(nullptr);
                   j["sb_stability_boundaries"] =
                       window ? json(semiclassical::symmetry_breaking_stability_boundaries(p, window->first, window->second,
                                                                                          0.01, opt))
                              : json::array();
                   auto describe = [&](const semiclassical::FixedPoint& fp) {
                     json e;
                     e["alpha_b"] = complex_json(fp.state.alpha_b);
                     e["alpha_a"] = complex_json(fp.state.alpha_a);
                     e["stability"] = semiclassical::to_string(fp.stability);
                     e["symmetry_breaking"] = fp.symmetry_breaking;
                     json ev = json::array();
                     for (const cplx z : fp.jacobian_eigenvalues) ev.push_back(complex_json(z));
                     e["eigenvalues"] = ev;
                     return e;
                   };
                   j["f_tilde"] = p.f_tilde;
                   j["symmetric"] = describe(semiclassical::fixed_point_symmetric(p));
                   json sb = json::array();
                   for (const auto& fp : semiclassical::find_symmetry_breaking_fixed_points(p, opt)) sb.push_back(describe(fp));
                   j["symmetry_breaking"] = sb;
                   ctx.write_json("fixed_points.json", j);
                   ctx.results()["window"] = j["window"];

                   if (grid->f_max >= grid->f_min) {
                     CsvWriter w(ctx.output("fixed_points.csv"),
                                 {"f_tilde", "amplitude", "re_lb_plus", "im_lb_plus", "re_lb_minus", "im_lb_minus",
                                  "re_la_plus", "im_la_plus", "re_la_minus", "im_la_minus", "stability",
                                  "n_symmetry_breaking", "n_sb_attractive"});
                     for (const double f : grid->values(p.f_tilde)) {
                       DimerParams q = p;
                       q.f_tilde = f;
                       const auto fp = semiclassical::fixed_point_symmetric(q);
                       const auto ev = semiclassical::symmetric_fp_eigenvalues(q);
                       w.field(f).field(semiclassical::symmetric_fixed_point_amplitude(q));
                       for (const cplx z : ev) w.field(z.real()).field(z.imag());
                       w.field(semiclassical::to_string(fp.stability));
                       const auto sbs = semiclassical::find_symmetry_breaking_fixed_points(q, opt);
                       const auto attractive = std::count_if(sbs.begin(), sbs.end(), [](const auto& x) {
                         return x.stability == semiclassical::Stability::Attractive;
                       });
                       w.field(static_cast<std::int64_t>(sbs.size())).field(static_cast<std::int64_t>(attractive));
                       w.end_row();
                     }
                   }
                 }});
}

void add_evolve(CLI::App& app, std::vector<Command>& out) {
  auto* sub = app.add_subcommand("evolve", "quantum time series by master equation, quantum jumps or TWA");
  struct Opts {
    std::string method = "master";
    double t_final = 20.0;
    double sample_interval = 0.1;
    double a1_re = -1.0, a1_im = 0.0, a2_re = 0.0, a2_im = 0.0;
    int nmax = 0;
    std::int64_t n_traj = 5000;
    double dt = 1e-3;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--method", o->method)->capture_default_str()->check(CLI::IsMember({"master", "jump", "twa"}));
  sub->add_option("--t-final,--t_final", o->t_final)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--sample-interval,--sample_interval", o->sample_interval)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--alpha1-re,--alpha1_re", o->a1_re, "rescaled initial amplitude of site 1")->capture_default_str();
  sub->add_option("--alpha1-im,--alpha1_im", o->a1_im)->capture_default_str();
  sub->add_option("--alpha2-re,--alpha2_re", o->a2_re)->capture_default_str();
  sub->add_option("--alpha2-im,--alpha2_im", o->a2_im)->capture_default_str();
  sub->add_option("--nmax", o->nmax, "Fock cutoff per mode; 0 picks ceil(3 N max(1, f^2)) + 5")->capture_default_str();
  sub->add_option("--n-traj,--n_traj", o->n_traj)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--dt", o->dt, "TWA step")->capture_default_str()->check(CLI::PositiveNumber);
  out.push_back({sub, [o](RunContext& ctx) {
                   const DimerParams& p = ctx.globals().params;
                   p.validate();
                   const double sn = std::sqrt(p.n_scale);
                   const cplx a1 = sn * cplx(o->a1_re, o->a1_im), a2 = sn * cplx(o->a2_re, o->a2_im);
                   ctx.settings() = {{"method", o->method},   {"t_final", o->t_final}, {"sample_interval", o->sample_interval},
                                     {"alpha1", complex_json(a1)}, {"alpha2", complex_json(a2)}};
                   std::vector<std::string> header = {"t",       "re_mean_aA", "im_mean_aA", "re_mean_aB", "im_mean_aB",
                                                      "n_A",     "n_B",        "se_re_aA",   "se_im_aA",   "se_re_aB",
                                                      "se_im_aB", "se_n_A",    "se_n_B"};
                   if (o->method == "twa") {
                     header.emplace_back("n_diverged");
                     twa::TwaOptions to;
                     to.dt = o->dt;
                     to.sample_interval = o->sample_interval;
                     to.noise = twa::noise_model_from_string(ctx.globals().twa_noise);
                     to.threads = ctx.threads();
                     ctx.settings()["n_traj"] = o->n_traj;
                     ctx.settings()["dt"] = o->dt;
                     const auto r = twa::twa_ensemble(a1, a2, p, o->t_final, o->n_traj, ctx.globals().seed, to);
                     CsvWriter w(ctx.output("timeseries.csv"), header);
                     const auto& st = r.stats;
                     for (std::size_t s = 0; s < r.times.size(); ++s) {
                       w.field(r.times[s]);
                       w.field(st.mean_at(s, 2).real()).field(st.mean_at(s, 2).imag());
                       w.field(st.mean_at(s, 3).real()).field(st.mean_at(s, 3).imag());
                       w.field(st.mean_at(s, 6).real()).field(st.mean_at(s, 7).real());
                       w.field(st.stderr_re_at(s, 2)).field(st.stderr_im_at(s, 2));
                       w.field(st.stderr_re_at(s, 3)).field(st.stderr_im_at(s, 3));
                       w.field(st.stderr_re_at(s, 6)).field(st.stderr_re_at(s, 7));
                       w.field(r.n_diverged);
                       w.end_row();
                     }
                     ctx.results()["n_diverged"] = r.n_diverged;
                     return;
                   }
                   const int nmax = o->nmax > 0 ? o->nmax : fock::suggested_cutoff(p.n_scale, p.f_tilde);
                   const fock::FockSpace space(nmax, nmax);
                   const auto coh = fock::coherent_state(a1, a2, space);
                   ctx.settings()["nmax"] = nmax;
                   ctx.results()["coherent_tail_mass"] = coh.tail_mass;
                   CsvWriter w(ctx.output("timeseries.csv"), header);
                   if (o->method == "master") {
                     const auto r = fock::integrate_master(fock::projector(coh.vector), p, space, o->t_final, o->sample_interval);
                     for (std::size_t s = 0; s < r.times.size(); ++s) {
                       w.field(r.times[s]);
                       w.field(r.values[0][s].real()).field(r.values[0][s].imag());
                       w.field(r.values[1][s].real()).field(r.values[1][s].imag());
                       w.field(r.values[2][s].real()).field(r.values[3][s].real());
                       for (int c = 0; c < 6; ++c) w.field(0.0);
                       w.end_row();
                     }
                     ctx.results()["max_trace_drift"] = r.max_trace_drift;
                     ctx.results()["min_eigenvalue"] = r.min_eigenvalue;
                     ctx.results()["positivity_violated"] = r.positivity_violated;
                     return;
                   }
                   fock::JumpOptions jo;
                   jo.sample_interval = o->sample_interval;
                   jo.threads = ctx.threads();
                   ctx.settings()["n_traj"] = o->n_traj;
                   const auto r =
                       fock::quantum_jump_ensemble(coh.vector, p, space, o->t_final, o->n_traj, ctx.globals().seed, {}, jo);
                   const auto& st = r.stats;
                   for (std::size_t s = 0; s < r.times.size(); ++s) {
                     w.field(r.times[s]);
                     w.field(st.mean_at(s, 0).real()).field(st.mean_at(s, 0).imag());
                     w.field(st.mean_at(s, 1).real()).field(st.mean_at(s, 1).imag());
                     w.field(st.mean_at(s, 2).real()).field(st.mean_at(s, 3).real());
                     w.field(st.stderr_re_at(s, 0)).field(st.stderr_im_at(s, 0));
                     w.field(st.stderr_re_at(s, 1)).field(st.stderr_im_at(s, 1));
                     w.field(st.stderr_re_at(s, 2)).field(st.stderr_re_at(s, 3));
                     w.end_row();
                   }
                   ctx.results()["total_jumps"] = r.total_jumps;
                 }});
}

void add_spectrum(CLI::App& app, std::vector<Command>& out) {
  auto* sub = app.add_subcommand("spectrum-liouville", "Liouvillian gap sweep per parity sector and scaling fits");
  struct Opts {
    std::vector<double> n_values = {1, 2, 3, 5, 8};
    int k_plus = 8;
    int k_minus = 2;
    std::string transform = "auto";
    double memory_cap_gb = 3.0;
    double window_lo = 0.95;
    double window_hi = 1.55;
    double f_ref = 0.5;
  };
  auto o = std::make_shared<Opts>();
  auto grid = std::make_shared<FGrid>();
  grid->add(sub, 0.05);
  grid->f_min = 0.05;
  grid->f_max = 2.0;
  sub->add_option("--n-values,--n_values", o->n_values, "comma-separated N values")->delimiter(',')->capture_default_str();
  sub->add_option("--k-plus,--k_plus", o->k_plus)->capture_default_str();
  sub->add_option("--k-minus,--k_minus", o->k_minus)->capture_default_str();
  sub->add_option("--transform", o->transform)->capture_default_str()->check(
      CLI::IsMember({"auto", "propagator", "shift-invert", "dense"}));
  sub->add_option("--memory-cap-gb,--memory_cap_gb", o->memory_cap_gb)->capture_default_str();
  sub->add_option("--window-lo,--window_lo", o->window_lo, "lower drive bound for the lambda1- maximum")->capture_default_str();
  sub->add_option("--window-hi,--window_hi", o->window_hi)->capture_default_str();
  sub->add_option("--f-ref,--f_ref", o->f_ref, "drive at which |Re lambda2+| is fitted")->capture_default_str();
  out.push_back({sub, [o, grid](RunContext& ctx) {
                   const DimerParams& base = ctx.globals().params;
                   spectra::GapSweepOptions so;
                   so.k_plus = o->k_plus;
                   so.k_minus = o->k_minus;
                   so.eigen.transform = spectra::transform_from_string(o->transform);
                   so.eigen.seed = ctx.globals().seed;
                   so.build.memory_cap_bytes = o->memory_cap_gb * 1e9;
                   so.threads = ctx.threads();
                   for (const double n : o->n_values) {
                     const int nmax = spectra::spectral_cutoff(n);
                     const fock::FockSpace sp(nmax, nmax);
                     const double bytes = spectra::estimate_liouvillian_bytes(sp);
                     if (bytes > so.build.memory_cap_bytes)
                       throw spectra::MemoryCapExceeded(static_cast<long long>(sp.dim()) * sp.dim(), bytes,
                                                        so.build.memory_cap_bytes);
                   }
                   auto fs = grid->values(base.f_tilde);
                   if (std::find(fs.begin(), fs.end(), o->f_ref) == fs.end()) {
                     fs.push_back(o->f_ref);
                     std::sort(fs.begin(), fs.end());
                   }
                   ctx.settings() = {{"n_values", o->n_values}, {"f_values", fs},       {"k_plus", o->k_plus},
                                     {"k_minus", o->k_minus},   {"transform", o->transform}};
                   const auto pts = spectra::gap_sweep(base, fs, o->n_values, so);
                   CsvWriter w(ctx.output("gaps.csv"),
                               {"N", "f_tilde", "nmax", "re_l1p", "im_l1p", "re_l2p", "im_l2p", "re_l1m", "im_l1m",
                                "max_residual", "seconds", "error"});
                   for (const auto& g : pts) {
                     w.field(g.n_scale).field(g.f_tilde).field(g.nmax);
                     field_opt(w, g.l1p);
                     field_opt(w, g.l2p);
                     field_opt(w, g.l1m);
                     w.field(g.max_residual).field(g.seconds).field(g.error);
                     w.end_row();
                   }
                   json summary;
                   std::vector<double> ns, l1m_max, l2p_ref, l2p_at_max;
                   json per_n = json::array();
                   for (const double n : o->n_values) {
                     const spectra::GapPoint* best = nullptr;
                     const spectra::GapPoint* ref = nullptr;
                     for (const auto& g : pts) {
                       if (g.n_scale != n) continue;
                       if (g.f_tilde == o->f_ref) ref = &g;
                       if (g.f_tilde < o->window_lo - 1e-12 || g.f_tilde > o->window_hi + 1e-12 || !g.l1m) continue;
                       if (!best || g.l1m->real() > best->l1m->real()) best = &g;
                     }
                     json e = {{"N", n}};
                     e["l1m_max"] = best ? complex_json(*best->l1m) : json(nullptr);
                     e["l1m_max_f"] = best ? json(best->f_tilde) : json(nullptr);
                     e["l2p_at_l1m_max"] = best ? optional_json(best->l2p) : json(nullptr);
                     e["l2p_ref"] = ref ? optional_json(ref->l2p) : json(nullptr);
                     per_n.push_back(e);
                     if (best && ref && ref->l2p && best->l2p) {
                       ns.push_back(n);
                       l1m_max.push_back(std::abs(best->l1m->real()));
                       l2p_at_max.push_back(std::abs(best->l2p->real()));
                       l2p_ref.push_back(std::abs(ref->l2p->real()));
                     }
                   }
                   summary["per_n"] = per_n;
                   auto fit_json = [&](const std::vector<double>& v) -> json {
                     if (ns.size() < 3) return nullptr;
                     const auto f = spectra::scaling_fit(ns, v);
                     return {{"beta", f.beta}, {"prefactor", f.prefactor}, {"r_squared", f.r_squared}};
                   };
                   summary["fit_l1m_max"] = fit_json(l1m_max);
                   summary["fit_l2p_at_l1m_max"] = fit_json(l2p_at_max);
                   summary["fit_l2p_ref"] = fit_json(l2p_ref);
                   const auto window = semiclassical::instability_window(base);
                   summary["instability_window"] = window ? json::array({window->first, window->second}) : json(nullptr);
                   ctx.write_json("summary.json", summary);
                   ctx.results() = summary;
                 }});
}

void add_g2(CLI::App& app, std::vector<Command>& out) {
  auto* sub = app.add_subcommand("g2", "second-order coherence from the steady state");
  struct Opts {
    std::vector<std::string> modes = {"1", "B"};
    double tau_max = 20.0;
    int n_points = 500;
    int nmax = 0;
    bool with_spectrum = false;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--modes", o->modes, "comma-separated subset of 1,2,A,B")->delimiter(',')->capture_default_str();
  sub->add_option("--tau-max,--tau_max", o->tau_max)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--n-points,--n_points", o->n_points)->capture_default_str();
  sub->add_option("--nmax", o->nmax, "Fock cutoff per mode; 0 picks ceil(3 N max(1, f^2)) + 5")->capture_default_str();
  sub->add_flag("--with-spectrum,--with_spectrum", o->with_spectrum, "also compute lambda2+ and compare frequencies");
  out.push_back({sub, [o](RunContext& ctx) {
                   const DimerParams& p = ctx.globals().params;
                   p.validate();
                   const int nmax = o->nmax > 0 ? o->nmax : fock::suggested_cutoff(p.n_scale, p.f_tilde);
                   const fock::FockSpace space(nmax, nmax);
                   const auto ss = fock::steady_state_solve(p, space);
                   const fock::Lindbladian gen(p, space);
                   correlations::G2Options go;
                   go.tau_max = o->tau_max;
                   go.n_points = o->n_points;
                   ctx.settings() = {{"modes", o->modes}, {"tau_max", o->tau_max}, {"n_points", o->n_points}, {"nmax", nmax}};
                   json meta = {{"nmax", nmax}, {"steady_state_residual", ss.residual}};
                   std::optional<cplx> l2p;
                   if (o->with_spectrum) {
                     spectra::SpectrumOptions so;
                     so.k_plus = 8;
                     so.k_minus = 0;
                     const auto spec = spectra::compute_spectrum(p, space, so);
                     for (const auto& m : spec.modes)
                       if (m.sector > 0 && std::abs(m.value.imag()) >= spectra::kRealEigenvalue) {
                         l2p = m.value.imag() > 0 ? m.value : std::conj(m.value);
                         break;
                       }
                     meta["l2p"] = optional_json(l2p);
                   }
                   CsvWriter w(ctx.output("g2.csv"), {"mode", "tau", "g2"});
                   json curves = json::object();
                   for (const auto& label : o->modes) {
                     const auto mode = correlations::mode_from_string(label);
                     const auto c = correlations::g2(mode, ss.rho, gen, go);
                     for (std::size_t i = 0; i < c.taus.size(); ++i) {
                       w.field(correlations::to_string(mode)).field(c.taus[i]).field(c.values[i]);
                       w.end_row();
                     }
                     json e = {{"occupation", c.occupation}, {"max_imag", c.max_imag}, {"g2_zero", c.values.front()}};
                     if (c.values.size() >= 64) {
                       const double w = correlations::dominant_frequency(c);
                       e["dominant_frequency"] = w;
                       if (l2p) e["frequency_ratio_to_im_l2p"] = w / std::abs(l2p->imag());
                     }
                     curves[correlations::to_string(mode)] = e;
                   }
                   meta["curves"] = curves;
                   ctx.write_json("g2_meta.json", meta);
                   ctx.results() = meta;
                 }});
}

void add_fft(CLI::App& app, std::vector<Command>& out) {
  auto* sub = app.add_subcommand("fft", "Fourier spectrum and comb statistics of a CSV time series");
  struct Opts {
    std::string input;
    std::string column;
    std::string imag_column;
    std::string time_column = "t";
    std::string window = "hann";
    double rel_height = analysis::kDefaultRelHeight;
    int zero_pad = 1;
    double t_from = -1e300;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--input", o->input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  sub->add_option("--column", o->column, "real part column")->required();
  sub->add_option("--imag-column,--imag_column", o->imag_column, "imaginary part column");
  sub->add_option("--time-column,--time_column", o->time_column)->capture_default_str();
  sub->add_option("--window", o->window)->capture_default_str()->check(CLI::IsMember({"none", "hann"}));
  sub->add_option("--rel-height,--rel_height", o->rel_height)->capture_default_str();
  sub->add_option("--zero-pad,--zero_pad", o->zero_pad)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--t-from,--t_from", o->t_from, "discard samples before this time");
  out.push_back({sub, [o](RunContext& ctx) {
                   std::ifstream in(o->input);
                   std::string line;
                   if (!std::getline(in, line)) throw std::runtime_error("empty input file");
                   const auto header = split_csv_line(line);
                   auto col = [&](const std::string& name) -> int {
                     const auto it = std::find(header.begin(), header.end(), name);
                     if (it == header.end()) throw std::invalid_argument("column not found: " + name);
                     return static_cast<int>(it - header.begin());
                   };
                   const int ct = col(o->time_column), cr = col(o->column);
                   const int ci = o->imag_column.empty() ? -1 : col(o->imag_column);
                   std::vector<double> t;
                   std::vector<cplx> z;
                   while (std::getline(in, line)) {
                     if (line.empty()) continue;
                     const auto cells = split_csv_line(line);
                     const double tv = std::stod(cells.at(static_cast<std::size_t>(ct)));
                     if (tv < o->t_from) continue;
                     t.push_back(tv);
                     z.emplace_back(std::stod(cells.at(static_cast<std::size_t>(cr))),
                                    ci < 0 ? 0.0 : std::stod(cells.at(static_cast<std::size_t>(ci))));
                   }
                   if (t.size() < 64) throw std::invalid_argument("fft needs at least 64 samples");
                   const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
                   for (std::size_t i = 1; i < t.size(); ++i)
                     if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) throw std::invalid_argument("time column is not uniform");
                   const auto window = o->window == "hann" ? analysis::Window::Hann : analysis::Window::None;
                   auto spec = ci < 0 ? analysis::fourier_spectrum(std::vector<double>([&] {
                                          std::vector<double> r;
                                          for (const cplx v : z) r.push_back(v.real());
                                          return r;
                                        }()),
                                                                   dt, window, o->zero_pad)
                                      : analysis::fourier_spectrum(z, dt, window, o->zero_pad);
                   spec.peaks = analysis::detect_peaks(spec, o->rel_height);
                   ctx.settings() = {{"input", o->input},   {"column", o->column},       {"imag_column", o->imag_column},
                                     {"window", o->window}, {"rel_height", o->rel_height}, {"zero_pad", o->zero_pad},
                                     {"dt", dt},            {"n_samples", t.size()}};
                   CsvWriter w(ctx.output("spectrum.csv"), {"omega", "magnitude"});
                   for (std::size_t k = 0; k < spec.frequencies.size(); ++k) w.row({spec.frequencies[k], spec.magnitudes[k]});
                   CsvWriter pw(ctx.output("peaks.csv"), {"omega", "magnitude"});
                   for (const auto& pk : spec.peaks) pw.row({pk.frequency, pk.magnitude});
                   json r = {{"n_peaks", spec.peaks.size()}, {"bin_width", spec.bin_width}};
                   if (spec.peaks.size() >= 3) {
                     const auto cs = analysis::comb_spacing(spec.peaks);
                     r["mean_spacing"] = cs.mean_spacing;
                     r["relative_std"] = cs.relative_std;
                   }
                   ctx.results() = r;
                 }});
}

}  // namespace bhd::cli
