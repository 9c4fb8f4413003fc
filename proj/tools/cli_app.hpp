/*
 * Copyright 2026 The qdtpi developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#pragma once

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdtpi/io.hpp"

// Command-line surface. Every subcommand is deterministic given identical
// inputs and seed; units are spelled out in flag names and column headers.
// Exit codes: 0 success, 1 compute failure, 2 usage error.

namespace qdtpi::cli {

namespace detail {

struct PhononFlags {
  double alpha = 0.0;
  double nu_c = 1.0;
  double mu = 0.0;

  void attach(CLI::App* cmd, bool required = true) {
    auto* a = cmd->add_option("--alpha-ps2,--alpha", alpha, "coupling strength alpha [ps^2]");
    auto* n = cmd->add_option("--nu-c-ps-inv,--nu-c", nu_c, "cut-off frequency nu_c [ps^-1]");
    auto* m = cmd->add_option("--mu-ps2,--mu", mu, "virtual-process probability mu [ps^2]");
    if (required) {
      a->required();
      n->required();
      m->required();
    }
  }
  phonon::PhononParams params() const { return {alpha, nu_c, mu}; }
};

struct EmitterFilterFlags {
  std::optional<double> t1_ps;
  std::optional<double> gamma_ps_inv;
  std::optional<double> kappa_mev;
  std::optional<double> kappa_ps_inv;
  std::optional<double> delta_mev;
  std::optional<double> delta_ps_inv;
  std::optional<std::string> config_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config with emitter/filter fields");
    cmd->add_option("--t1-ps", t1_ps, "radiative lifetime T1 [ps]");
    cmd->add_option("--gamma-ps-inv", gamma_ps_inv, "radiative rate Gamma [ps^-1]");
    cmd->add_option("--kappa-mev", kappa_mev, "filter width kappa [meV]");
    cmd->add_option("--kappa-ps-inv", kappa_ps_inv, "filter width kappa [ps^-1]");
    cmd->add_option("--delta-mev", delta_mev, "filter detuning delta [meV]");
    cmd->add_option("--delta-ps-inv", delta_ps_inv, "filter detuning delta [ps^-1]");
  }

  io::EmitterFilterConfig resolve() const {
    nlohmann::json j = nlohmann::json::object();
    if (config_path) {
      std::ifstream in(*config_path);
      if (!in) throw std::runtime_error("cannot open config file: " + *config_path);
      in >> j;
    }
    // flags override config fields
    if (gamma_ps_inv) j["gamma_ps_inv"] = *gamma_ps_inv;
    if (t1_ps && !gamma_ps_inv) {
      j.erase("gamma_ps_inv");
      j["T1_ps"] = *t1_ps;
    }
    if (kappa_ps_inv) j["kappa_ps_inv"] = *kappa_ps_inv;
    if (kappa_mev && !kappa_ps_inv) {
      j.erase("kappa_ps_inv");
      j["kappa_meV"] = *kappa_mev;
    }
    if (delta_ps_inv) j["delta_ps_inv"] = *delta_ps_inv;
    if (delta_mev && !delta_ps_inv) {
      j.erase("delta_ps_inv");
      j["delta_meV"] = *delta_mev;
    }
    return io::parse_emitter_filter_config(j, "emitter/filter configuration");
  }

  void stamp(io::Provenance& prov, const io::EmitterFilterConfig& cfg) const {
    prov.add("gamma_ps_inv", cfg.emitter_params.gamma);
    prov.add("kappa_ps_inv", cfg.filter.kappa);
    prov.add("delta_ps_inv", cfg.filter.delta);
  }
};

inline std::vector<double> temperature_grid(double t_min, double t_max, int steps) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || steps < 1)
    throw std::runtime_error("invalid temperature grid");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    out.push_back(steps == 1 ? t_min
                             : t_min + (t_max - t_min) * i / static_cast<double>(steps - 1));
  }
  return out;
}

}  // namespace detail

/// Entry point shared by the binary and the in-process tests.
inline int run(const std::vector<std::string>& args) {
  CLI::App app{"phonon-limited indistinguishability of a resonantly driven quantum-dot single-photon source"};
  app.set_version_flag("--version", std::string("qdtpi ") + io::tool_version);
  app.require_subcommand(1);
  unsigned seed = 0;
  app.add_option("--seed", seed, "seed recorded in outputs and used by synthetic generators");

  // --- gamma: pure-dephasing rate sweep --------------------------------
  auto* gamma_cmd = app.add_subcommand("gamma", "sweep the ZPL pure-dephasing rate over temperature");
  detail::PhononFlags gamma_phonon;
  gamma_phonon.attach(gamma_cmd);
  double g_tmin = 2.0, g_tmax = 30.0;
  int g_steps = 29;
  std::string g_out = "gamma.csv";
  gamma_cmd->add_option("--t-min-k,--t-min", g_tmin, "lowest temperature [K]");
  gamma_cmd->add_option("--t-max-k,--t-max", g_tmax, "highest temperature [K]");
  gamma_cmd->add_option("--steps", g_steps, "number of grid points");
  gamma_cmd->add_option("-o,--output", g_out, "output CSV path");

  // --- spectrum: emission spectrum slice -------------------------------
  auto* spec_cmd = app.add_subcommand("spectrum", "emission spectrum (ZPL + phonon sideband)");
  detail::PhononFlags spec_phonon;
  spec_phonon.attach(spec_cmd);
  detail::EmitterFilterFlags spec_filter;
  spec_filter.attach(spec_cmd);
  double s_temp = 4.0, s_wmin = -60.0, s_wmax = 60.0;
  int s_steps = 2001;
  std::string s_mode = "full", s_sideband = "exact", s_out = "spectrum.csv";
  spec_cmd->add_option("--temp-k", s_temp, "temperature [K]");
  spec_cmd->add_option("--omega-min-ps-inv", s_wmin, "lowest frequency offset [ps^-1]");
  spec_cmd->add_option("--omega-max-ps-inv", s_wmax, "highest frequency offset [ps^-1]");
  spec_cmd->add_option("--steps", s_steps, "number of grid points");
  spec_cmd->add_option("--mode", s_mode, "full | zpl-only | sideband-only")
      ->check(CLI::IsMember({"full", "zpl-only", "sideband-only"}));
  spec_cmd->add_option("--sideband", s_sideband, "sideband evaluation: exact | weak")
      ->check(CLI::IsMember({"exact", "weak"}));
  spec_cmd->add_option("-o,--output", s_out, "output CSV path");

  // --- visibility: model curve ------------------------------------------
  auto* vis_cmd = app.add_subcommand("visibility", "TPI visibility curve versus temperature");
  detail::PhononFlags vis_phonon;
  vis_phonon.attach(vis_cmd);
  detail::EmitterFilterFlags vis_filter;
  vis_filter.attach(vis_cmd);
  double v_tmin = 2.0, v_tmax = 30.0;
  int v_steps = 57;
  std::string v_out = "visibility.csv";
  vis_cmd->add_option("--t-min-k,--t-min", v_tmin, "lowest temperature [K]");
  vis_cmd->add_option("--t-max-k,--t-max", v_tmax, "highest temperature [K]");
  vis_cmd->add_option("--steps", v_steps, "number of grid points");
  vis_cmd->add_option("-o,--output", v_out, "output CSV path");

  // --- fit-visibility ---------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit-visibility",
                                     "fit (alpha, nu_c, mu) to measured visibility vs temperature");
  std::string f_data;
  fit_cmd->add_option("--data", f_data, "CSV temperature_K,visibility,sigma")->required();
  detail::EmitterFilterFlags fit_filter;
  fit_filter.attach(fit_cmd);
  detail::PhononFlags fit_init;
  fit_init.alpha = 0.01;
  fit_init.nu_c = 8.0;
  fit_init.mu = 5e-4;
  fit_cmd->add_option("--init-alpha-ps2", fit_init.alpha, "initial alpha [ps^2]");
  fit_cmd->add_option("--init-nu-c-ps-inv", fit_init.nu_c, "initial nu_c [ps^-1]");
  fit_cmd->add_option("--init-mu-ps2", fit_init.mu, "initial mu [ps^2]");
  bool f_no_multi_start = false;
  fit_cmd->add_flag("--no-multi-start", f_no_multi_start, "single start from the initial guess");
  std::string f_report = "fit_report.json", f_curve = "fit_curve.csv";
  fit_cmd->add_option("--out-report", f_report, "output JSON report path");
  fit_cmd->add_option("--out-curve", f_curve, "output CSV model curve path");

  // --- fts: pseudo-Voigt fringe-contrast fit ----------------------------
  auto* fts_cmd = app.add_subcommand("fts", "fit a pseudo-Voigt profile to Michelson fringe contrast");
  std::string fts_data, fts_out = "fts_report.json";
  fts_cmd->add_option("--data", fts_data, "CSV delay_ps,contrast,sigma")->required();
  fts_cmd->add_option("-o,--output", fts_out, "output JSON report path");

  // --- hom: coincidence analysis pipeline -------------------------------
  auto* hom_cmd = app.add_subcommand("hom", "HBT/HOM histogram analysis and TPI visibility");
  std::string h_hbt, h_hbt_meta, h_hom, h_hom_meta, h_out = "hom_report.json";
  std::optional<double> h_t1_ns;
  double h_r = 0.5, h_t = 0.5, h_c2 = 1.0;
  hom_cmd->add_option("--hbt-data", h_hbt, "HBT histogram CSV delay_ns,counts")->required();
  hom_cmd->add_option("--hbt-meta", h_hbt_meta, "HBT metadata JSON")->required();
  hom_cmd->add_option("--hom-data", h_hom, "HOM histogram CSV delay_ns,counts")->required();
  hom_cmd->add_option("--hom-meta", h_hom_meta, "HOM metadata JSON")->required();
  hom_cmd->add_option("--t1-ns", h_t1_ns, "fix the peak decay time [ns] (fitted if omitted)");
  hom_cmd->add_option("--bs-reflectance", h_r, "beamsplitter reflectance R");
  hom_cmd->add_option("--bs-transmittance", h_t, "beamsplitter transmittance T");
  hom_cmd->add_option("--interferometer-c2", h_c2, "interferometer contrast squared C^2");
  hom_cmd->add_option("-o,--output", h_out, "output JSON report path");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qdtpi");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json err{{"error", "usage"}, {"detail", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 2;
  }

  try {
    if (gamma_cmd->parsed()) {
      const auto p = gamma_phonon.params();
      io::Provenance prov;
      prov.command = "gamma";
      prov.seed = seed;
      prov.add("alpha_ps2", p.alpha);
      prov.add("nu_c_ps_inv", p.nu_c);
      prov.add("mu_ps2", p.mu);
      prov.add("t_min_k", g_tmin);
      prov.add("t_max_k", g_tmax);
      io::CsvWriter csv(g_out, prov, "temperature_K,gamma_pd_ps_inv");
      for (double tk : detail::temperature_grid(g_tmin, g_tmax, g_steps))
        csv.row(tk, phonon::dephasing_rate(p, phonon::Temperature(tk)));
      return 0;
    }

    if (spec_cmd->parsed()) {
      const auto p = spec_phonon.params();
      const auto cfg = spec_filter.resolve();
      const phonon::Temperature t(s_temp);
      const auto mode = s_sideband == "weak" ? phonon::SidebandMode::weak_coupling
                                             : phonon::SidebandMode::exact;
      io::Provenance prov;
      prov.command = "spectrum";
      prov.seed = seed;
      prov.add("alpha_ps2", p.alpha);
      prov.add("nu_c_ps_inv", p.nu_c);
      prov.add("mu_ps2", p.mu);
      prov.add("temp_k", s_temp);
      prov.add("mode", s_mode);
      prov.add("sideband", s_sideband);
      spec_filter.stamp(prov, cfg);
      io::CsvWriter csv(s_out, prov, "omega_ps_inv,spectrum");

      const emitter::EmitterContext ctx(cfg.emitter_params, cfg.filter, p, t);
      std::vector<double> omegas;
      omegas.reserve(static_cast<std::size_t>(s_steps));
      for (int i = 0; i < s_steps; ++i)
        omegas.push_back(s_steps == 1 ? s_wmin
                                      : s_wmin + (s_wmax - s_wmin) * i / double(s_steps - 1));

      std::vector<std::complex<double>> sph(omegas.size(), {0.0, 0.0});
      if (s_mode != "zpl-only" && p.alpha > 0.0) {
        if (mode == phonon::SidebandMode::exact) {
          sph = phonon::sideband_spectrum_table(omegas, p, t);
        } else {
          for (std::size_t i = 0; i < omegas.size(); ++i)
            sph[i] = {phonon::sideband_spectrum_weak(omegas[i], p, t), 0.0};
        }
      }
      for (std::size_t i = 0; i < omegas.size(); ++i) {
        double s = 0.0;
        if (s_mode != "sideband-only")
          s += emitter::zpl_two_colour(omegas[i], omegas[i], ctx).real();
        if (s_mode != "zpl-only")
          s += emitter::sideband_two_colour_from(omegas[i], omegas[i], sph[i], sph[i], ctx).real();
        csv.row(omegas[i], s);
      }
      return 0;
    }

    if (vis_cmd->parsed()) {
      const auto p = vis_phonon.params();
      const auto cfg = vis_filter.resolve();
      io::Provenance prov;
      prov.command = "visibility";
      prov.seed = seed;
      prov.add("alpha_ps2", p.alpha);
      prov.add("nu_c_ps_inv", p.nu_c);
      prov.add("mu_ps2", p.mu);
      vis_filter.stamp(prov, cfg);
      io::CsvWriter csv(v_out, prov, "temperature_K,visibility_full,visibility_sideband_only");
      const auto grid = detail::temperature_grid(v_tmin, v_tmax, v_steps);
      tempfit::FilteredFractionCache cache;
      const auto full = tempfit::visibility_curve(p, cfg.emitter_params, cfg.filter, grid,
                                                  tempfit::CurveMode::full, &cache);
      const auto side = tempfit::visibility_curve(p, cfg.emitter_params, cfg.filter, grid,
                                                  tempfit::CurveMode::sideband_only, &cache);
      for (std::size_t i = 0; i < grid.size(); ++i)
        csv.row(grid[i], full[i].second, side[i].second);
      return 0;
    }

    if (fit_cmd->parsed()) {
      const auto cfg = fit_filter.resolve();
      auto points = io::read_visibility_csv(f_data);
      tempfit::VisibilityDataset data(std::move(points), cfg.emitter_params, cfg.filter);

      tempfit::PhononFitOptions opts;
      opts.multi_start = !f_no_multi_start;
      const phonon::PhononParams lower(1e-5, 0.5, 1e-7);
      const phonon::PhononParams upper(0.5, 50.0, 0.1);
      auto fit = tempfit::fit_visibility(data, fit_init.params(), lower, upper, opts);

      io::Provenance prov;
      prov.command = "fit-visibility";
      prov.seed = seed;
      prov.add("data", f_data);
      prov.add("init_alpha_ps2", fit_init.alpha);
      prov.add("init_nu_c_ps_inv", fit_init.nu_c);
      prov.add("init_mu_ps2", fit_init.mu);
      prov.add("multi_start", f_no_multi_start ? "false" : "true");
      fit_filter.stamp(prov, cfg);

      nlohmann::json results;
      results["alpha_ps2"] = fit.params.alpha;
      results["nu_c_ps_inv"] = fit.params.nu_c;
      results["mu_ps2"] = fit.params.mu;
      results["chi2"] = fit.fit.residual_norm;
      results["converged"] = fit.fit.converged;
      results["iterations"] = fit.fit.iterations;
      results["at_bounds"] = fit.fit.at_bounds;
      if (fit.fit.covariance.rows() == 3) {
        results["alpha_err"] = std::sqrt(std::max(0.0, fit.fit.covariance(0, 0)));
        results["nu_c_err"] = std::sqrt(std::max(0.0, fit.fit.covariance(1, 1)));
        results["mu_err"] = std::sqrt(std::max(0.0, fit.fit.covariance(2, 2)));
      }
      io::write_json_report(f_report, prov, results);

      io::CsvWriter csv(f_curve, prov, "temperature_K,visibility_full,visibility_sideband_only");
      const double t_lo = data.points.front().temperature_k;
      const double t_hi = data.points.back().temperature_k;
      const auto grid = detail::temperature_grid(std::max(1.0, 0.8 * t_lo), 1.1 * t_hi, 101);
      tempfit::FilteredFractionCache cache;
      const auto full = tempfit::visibility_curve(fit.params, cfg.emitter_params, cfg.filter,
                                                  grid, tempfit::CurveMode::full, &cache);
      const auto side = tempfit::visibility_curve(fit.params, cfg.emitter_params, cfg.filter,
                                                  grid, tempfit::CurveMode::sideband_only, &cache);
      for (std::size_t i = 0; i < grid.size(); ++i)
        csv.row(grid[i], full[i].second, side[i].second);
      return 0;
    }

    if (fts_cmd->parsed()) {
      auto data = io::read_fringe_csv(fts_data);
      auto fit = experiment::fit_fringe_contrast(data);
      io::Provenance prov;
      prov.command = "fts";
      prov.seed = seed;
      prov.add("data", fts_data);
      nlohmann::json results;
      results["T2_ps"] = fit.t2_ps;
      results["eta"] = fit.eta;
      results["T2_err_ps"] = fit.t2_err;
      results["eta_err"] = fit.eta_err;
      results["span_warning"] = fit.span_warning;
      results["converged"] = fit.fit.converged;
      results["chi2"] = fit.fit.residual_norm;
      io::write_json_report(fts_out, prov, results);
      return 0;
    }

    if (hom_cmd->parsed()) {
      const auto hbt = io::read_histogram(h_hbt, h_hbt_meta);
      const auto hom = io::read_histogram(h_hom, h_hom_meta);
      const experiment::SetupImperfections setup(h_r, h_t, h_c2);

      experiment::PeakFitResult hbt_details, hom_details;
      const auto a_hbt = experiment::extract_peak_areas(hbt, h_t1_ns, &hbt_details);
      const auto a_hom = experiment::extract_peak_areas(hom, h_t1_ns, &hom_details);
      const double g2_hbt_val = experiment::g2_hbt(a_hbt);
      const auto corrected = experiment::hom_background_correction(
          a_hom, a_hbt, hom.acquisition_time_s, hbt.acquisition_time_s);
      const double g2_hom_val = experiment::g2_hom(corrected.areas);
      const auto v = experiment::tpi_visibility(g2_hom_val, setup);

      io::Provenance prov;
      prov.command = "hom";
      prov.seed = seed;
      prov.add("hbt_data", h_hbt);
      prov.add("hom_data", h_hom);
      prov.add("bs_reflectance", h_r);
      prov.add("bs_transmittance", h_t);
      prov.add("interferometer_c2", h_c2);
      if (h_t1_ns) prov.add("t1_ns", *h_t1_ns);

      nlohmann::json results;
      auto areas_json = [](const experiment::PeakAreas& a) {
        return nlohmann::json{{"A1", a.a1}, {"A2", a.a2}, {"A3", a.a3},
                              {"side_bunch_mean", a.side_bunch_mean}};
      };
      results["hbt_areas"] = areas_json(a_hbt);
      results["hom_areas"] = areas_json(a_hom);
      results["corrected_areas"] = areas_json(corrected.areas);
      results["hbt_fit"] = {{"converged", hbt_details.converged},
                            {"windowed_fallback", hbt_details.windowed_fallback},
                            {"t1_ns", hbt_details.t1_ns}};
      results["hom_fit"] = {{"converged", hom_details.converged},
                            {"windowed_fallback", hom_details.windowed_fallback},
                            {"t1_ns", hom_details.t1_ns}};
      results["g2_hbt"] = g2_hbt_val;
      results["g2_hom"] = g2_hom_val;
      results["correction_clipped"] = corrected.clipped;
      results["correction_inconsistent"] = corrected.inconsistency_warning;
      results["correction_factor"] = experiment::tpi_correction_factor(setup);
      results["v_tpi"] = v.value;
      results["v_tpi_raw"] = v.raw;
      results["v_tpi_clamped"] = v.clamped;
      io::write_json_report(h_out, prov, results);
      return 0;
    }
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", "compute"}, {"detail", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 1;
  }

  return 2;  // no subcommand matched (require_subcommand should prevent this)
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace qdtpi::cli
