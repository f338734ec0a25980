#pragma once

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "obskit/ambiguity.hpp"
#include "obskit/errors.hpp"
#include "obskit/estimator.hpp"
#include "obskit/measurement.hpp"
#include "obskit/observability.hpp"
#include "obskit/random.hpp"
#include "obskit/scenario_io.hpp"
#include "obskit/serialize.hpp"

namespace obskit {

namespace cli_detail {

struct CommonOptions {
  std::string scenario_path;
  std::string output;
  std::optional<std::size_t> grid_points;
  std::optional<double> rank_tol;
};

inline Scenario load_with_overrides(const CommonOptions& opts) {
  Scenario s = load_scenario(opts.scenario_path);
  if (opts.grid_points) {
    if (*opts.grid_points < 2) throw ValidationError("grid_points", "--grid-points must be >= 2");
    s.grid_points = *opts.grid_points;
  }
  if (opts.rank_tol) {
    if (!(*opts.rank_tol > 0.0)) throw ValidationError("rank_tol", "--rank-tol must be positive");
    s.tolerances.rank_tol = *opts.rank_tol;
  }
  return s;
}

/// Writes to `path`, or to `fallback` when the path is empty.
inline void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write(out);
}

inline void emit_json(const std::string& path, std::ostream& fallback, const nlohmann::json& doc) {
  emit(path, fallback, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

inline Regime parse_regime(const std::string& name) {
  if (name == "doppler") return Regime::doppler;
  if (name == "bearing") return Regime::bearing;
  if (name == "combined") return Regime::combined;
  throw ValidationError("regime", "unknown regime '" + name + "'");
}

inline const TargetSpec& target_at(const Scenario& s, std::size_t index) {
  if (index >= s.targets.size()) {
    throw ValidationError("target", "index " + std::to_string(index) + " out of range");
  }
  return s.targets[index];
}

inline double tonal_or(const TargetSpec& target, double fallback) {
  return target.tonal ? target.tonal->f0 : fallback;
}

/// Measurement history of a generated track (id 0) and its base (id 1).
inline MeasurementHistory pair_history(const SampledTrajectory& generated, double f_generated,
                                       const PolynomialTrajectory& base, std::optional<double> f_base,
                                       const Scenario& s, std::span<const double> grid) {
  MeasurementHistory h;
  h.times.assign(grid.begin(), grid.end());
  const TrackKinematics kg = kinematics(Track{generated}, s.observer, grid, s.tolerances.eps_range);
  const TrackKinematics kb = kinematics(Track{base}, s.observer, grid, s.tolerances.eps_range);
  for (const auto* k : {&kg, &kb}) {
    h.bearings.push_back(k->bearings);
    const std::optional<double> f0 = (k == &kg) ? std::optional<double>(f_generated) : f_base;
    if (f0) {
      std::vector<double> freqs;
      for (double rate : k->range_rates) freqs.push_back(doppler(Tonal(*f0), rate, s.c));
      h.dopplers.emplace_back(std::move(freqs));
    } else {
      h.dopplers.emplace_back(std::nullopt);
    }
  }
  return h;
}

struct SelftestLine {
  std::string name;
  bool pass;
  std::string detail;
};

inline std::vector<SelftestLine> run_selftest(std::uint64_t seed, int trials) {
  TrajectorySampler sampler(seed);
  std::vector<SelftestLine> lines;

  double worst_rk4 = 0.0;
  for (int n = 0; n < trials; ++n) {
    const int p = sampler.uniform_int(0, 5);
    const double span = sampler.uniform(0.5, 5.0);
    Eigen::VectorXd x(2 * (p + 1));
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = sampler.uniform(-10.0, 10.0);
    const Eigen::VectorXd closed = transition_matrix(p, span, 0.0) * x;
    const Eigen::VectorXd numeric = propagate_ode(x, 0.0, span, 500);
    worst_rk4 = std::max(worst_rk4, (closed - numeric).norm() / x.norm());
  }
  lines.push_back({"transition matrix vs RK4", worst_rk4 < 1e-8, "max rel err " + format_number(worst_rk4)});

  double worst_pseudo = 0.0;
  for (int n = 0; n < trials; ++n) {
    const PolynomialTrajectory ob = sampler.polynomial(0.0, Vec2::Zero(), 2, {10.0, 0.5});
    const PolynomialTrajectory tg = sampler.polynomial(0.0, sampler.point_on_annulus(Vec2::Zero(), 2e3, 8e3), 1, {15.0});
    for (double t : uniform_grid(0.0, 20.0, 41)) {
      const RelativeState rel = relative_state(tg, ob, t);
      const double theta = bearing(rel);
      const double value = std::cos(theta) * rel.position.x() - std::sin(theta) * rel.position.y();
      worst_pseudo = std::max(worst_pseudo, std::abs(value) / rel.range);
    }
  }
  lines.push_back({"pseudo-linear identity", worst_pseudo < 1e-10, "max |c x| / range " + format_number(worst_pseudo)});

  double worst_doppler = 0.0;
  double allowed_doppler = 0.0;
  bool doppler_ok = true;
  const std::vector<double> grid = uniform_grid(0.0, 10.0, 401);
  const double dt = grid[1] - grid[0];
  for (int n = 0; n < trials; ++n) {
    const PolynomialTrajectory ob = sampler.polynomial(0.0, Vec2::Zero(), 1, {8.0});
    const PolynomialTrajectory base =
        sampler.polynomial(0.0, sampler.point_on_annulus(Vec2::Zero(), 1.5e4, 2.5e4), 1, {12.0});
    const double rate = sampler.uniform(-0.2, 0.2);
    const double offset = sampler.uniform(-1.0, 1.0);
    const DopplerAmbiguitySpec spec{sampler.uniform(0.9, 1.1), sampler.uniform(-500.0, 500.0),
                                    SampledFunction::on_grid(grid, [&](double t) { return offset + rate * t; }),
                                    kDefaultSoundSpeed};
    const SampledTrajectory generated = generate_doppler_ambiguous(base, ob, spec, grid);
    const double f_j = 1000.0;
    const AmbiguityCertificate cert = verify_ambiguity(Track{generated}, Track{base}, ob,
                                                       spec.counterpart_tonal(f_j), f_j, spec.c, grid, {},
                                                       Regime::doppler);
    const double allowed = 1e-9 * f_j + 10.0 * dt * dt;
    worst_doppler = std::max(worst_doppler, cert.residual_doppler);
    allowed_doppler = allowed;
    doppler_ok = doppler_ok && cert.residual_doppler < allowed;
  }
  lines.push_back({"doppler generator soundness", doppler_ok,
                   "max residual " + format_number(worst_doppler) + " Hz, bound " + format_number(allowed_doppler)});

  double worst_bearing = 0.0;
  for (int n = 0; n < trials; ++n) {
    const PolynomialTrajectory ob = sampler.polynomial(0.0, Vec2::Zero(), 1, {8.0});
    const PolynomialTrajectory base =
        sampler.polynomial(0.0, sampler.point_on_annulus(Vec2::Zero(), 2e3, 8e3), 1, {12.0});
    const double amp = sampler.uniform(0.1, 0.6);
    const double freq = sampler.uniform(0.2, 1.0);
    const SampledFunction alpha =
        SampledFunction::on_grid(grid, [&](double t) { return 1.0 + amp * std::sin(freq * t); });
    const SampledTrajectory generated = generate_bearing_ambiguous(base, ob, alpha, grid);
    const AmbiguityCertificate cert = verify_ambiguity(Track{generated}, Track{base}, ob, 1000.0, 1000.0,
                                                       kDefaultSoundSpeed, grid, {}, Regime::bearing);
    worst_bearing = std::max(worst_bearing, cert.residual_bearing);
  }
  lines.push_back({"bearing generator soundness", worst_bearing < 1e-10,
                   "max residual " + format_number(worst_bearing) + " rad"});
  return lines;
}

}  // namespace cli_detail

/// Entry point of the `obskit` command line tool. Returns 0 on success, 1 on
/// invalid input, 2 when an analysis fails.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Observability and trajectory-ambiguity analysis for bearings/Doppler tracking"};
  app.name("obskit");
  app.require_subcommand(1);

  CommonOptions common;
  const auto add_common = [&](CLI::App* sub, bool with_rank_tol) {
    sub->add_option("scenario", common.scenario_path, "Scenario JSON file")->required();
    sub->add_option("-o,--output", common.output, "Output file (default: stdout)");
    sub->add_option("--grid-points", common.grid_points, "Override the scenario grid size");
    if (with_rank_tol) sub->add_option("--rank-tol", common.rank_tol, "Relative singular-value threshold");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Emit the noise-free measurement history as CSV");
  add_common(simulate, false);

  CLI::App* observability = app.add_subcommand("observability", "Gramian rank test and bearing diagnostics");
  add_common(observability, true);

  CLI::App* estimate = app.add_subcommand("estimate", "Pseudo-linear recovery of the initial target states");
  add_common(estimate, true);

  CLI::App* ambiguity = app.add_subcommand("ambiguity", "Construct or verify ambiguous trajectory pairs");
  ambiguity->require_subcommand(1);

  std::string regime_name;
  std::size_t base_index = 0;
  double l_prime = 1.0;
  double b_prime = 0.0;
  double rotation_offset = 0.0;
  double rotation_rate = 0.0;
  double alpha_mean = 1.0;
  double alpha_amplitude = 0.0;
  double alpha_frequency = 0.0;
  std::string certificate_path;
  std::string trajectory_path;

  CLI::App* generate = ambiguity->add_subcommand("generate", "Generate an ambiguous counterpart of a target");
  add_common(generate, false);
  generate->add_option("--regime", regime_name, "doppler | bearing")->required();
  generate->add_option("--target", base_index, "Index of the base target");
  generate->add_option("--l-prime", l_prime, "Tonal ratio f_base / f_generated (doppler)");
  generate->add_option("--b-prime", b_prime, "Range offset in meters (doppler)");
  generate->add_option("--rotation-offset", rotation_offset, "Rotation angle at t_start in rad (doppler)");
  generate->add_option("--rotation-rate", rotation_rate, "Rotation rate in rad/s (doppler)");
  generate->add_option("--alpha-mean", alpha_mean, "Mean range scale factor (bearing)");
  generate->add_option("--alpha-amplitude", alpha_amplitude, "Sinusoidal amplitude of the scale factor (bearing)");
  generate->add_option("--alpha-frequency", alpha_frequency, "Angular frequency of the scale factor in rad/s (bearing)");
  generate->add_option("--certificate", certificate_path, "Certificate JSON output (default: stdout)");
  generate->add_option("--trajectory", trajectory_path, "Also write the generated positions as t,x,y CSV");

  std::vector<std::size_t> pair;
  double tonal_i = 0.0;
  CLI::App* verify = ambiguity->add_subcommand("verify", "Compare the measurement histories of two tracks");
  add_common(verify, false);
  verify->add_option("--regime", regime_name, "doppler | bearing | combined")->required();
  verify->add_option("--pair", pair, "Two scenario target indices i,j")->delimiter(',')->expected(2);
  verify->add_option("--trajectory", trajectory_path, "t,x,y CSV of track i (instead of --pair)");
  verify->add_option("--target", base_index, "Scenario target used as track j with --trajectory");
  verify->add_option("--tonal-hz", tonal_i, "Tonal of the CSV track (default: track j's tonal)");

  CLI::App* selftest = app.add_subcommand("selftest", "Run randomized consistency checks");
  std::uint64_t seed = 1;
  int trials = 20;
  selftest->add_option("--seed", seed, "Random seed");
  selftest->add_option("--trials", trials, "Trials per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (simulate->parsed()) {
      const Scenario s = load_with_overrides(common);
      const MeasurementHistory h = measure_scenario(s);
      emit(common.output, out, [&](std::ostream& os) { write_history_csv(h, os); });
      return 0;
    }

    if (observability->parsed()) {
      const Scenario s = load_with_overrides(common);
      const ObservabilityReport report = check_observable(s);
      emit_json(common.output, out, to_json(report));
      (common.output.empty() ? err : out) << text_summary(report);
      return 0;
    }

    if (estimate->parsed()) {
      const Scenario s = load_with_overrides(common);
      const EstimateResult result = estimate_initial_state(s);
      nlohmann::json doc = to_json(result);
      doc["replay_error_rad"] = detail::finite_or_null(cross_validate(s, result));
      emit_json(common.output, out, doc);
      return 0;
    }

    if (generate->parsed()) {
      const Scenario s = load_with_overrides(common);
      const Regime regime = parse_regime(regime_name);
      if (regime == Regime::combined) throw ValidationError("regime", "generate supports doppler or bearing");
      const TargetSpec& base = target_at(s, base_index);
      const std::vector<double> grid = s.grid();
      const double t0 = grid.front();
      nlohmann::json doc;
      SampledTrajectory generated({t0, t0 + 1.0}, {Vec2::Zero(), Vec2::Zero()});
      double f_generated = 0.0;
      if (regime == Regime::doppler) {
        if (!base.tonal) throw ValidationError("targets[" + std::to_string(base_index) + "].tonal_hz",
                                               "doppler regime needs a tonal on the base target");
        const DopplerAmbiguitySpec spec{
            l_prime, b_prime,
            SampledFunction::on_grid(grid, [&](double t) { return rotation_offset + rotation_rate * (t - t0); }),
            s.c};
        spec.validate();
        generated = generate_doppler_ambiguous(base.trajectory, s.observer, spec, grid, s.tolerances.eps_range);
        f_generated = spec.counterpart_tonal(base.tonal->f0);
        doc["spec"] = {{"l_prime", l_prime},
                       {"b_prime", b_prime},
                       {"rotation_offset", rotation_offset},
                       {"rotation_rate", rotation_rate},
                       {"c", s.c}};
        doc["combined_check"] = to_json(check_combined_condition(Track{generated}, base.trajectory, s.observer,
                                                                 spec, grid, 1e-8, s.tolerances.eps_range));
      } else {
        const SampledFunction alpha = SampledFunction::on_grid(
            grid, [&](double t) { return alpha_mean + alpha_amplitude * std::sin(alpha_frequency * (t - t0)); });
        generated = generate_bearing_ambiguous(base.trajectory, s.observer, alpha, grid);
        f_generated = tonal_or(base, 1000.0);
        doc["spec"] = {{"alpha_mean", alpha_mean},
                       {"alpha_amplitude", alpha_amplitude},
                       {"alpha_frequency", alpha_frequency}};
      }
      const double f_base = tonal_or(base, f_generated);
      doc["base_target"] = base_index;
      doc["certificate"] = to_json(verify_ambiguity(Track{generated}, Track{base.trajectory}, s.observer,
                                                    f_generated, f_base, s.c, grid, s.tolerances, regime));
      const std::optional<double> base_tonal =
          base.tonal ? std::optional<double>(base.tonal->f0) : std::optional<double>(std::nullopt);
      const MeasurementHistory h = pair_history(generated, f_generated, base.trajectory,
                                                regime == Regime::doppler ? base_tonal : std::optional<double>(f_base),
                                                s, grid);
      emit(common.output, out, [&](std::ostream& os) { write_history_csv(h, os); });
      if (!trajectory_path.empty()) {
        emit(trajectory_path, out, [&](std::ostream& os) { write_trajectory_csv(generated, os); });
      }
      emit_json(certificate_path, common.output.empty() ? err : out, doc);
      return 0;
    }

    if (verify->parsed()) {
      const Scenario s = load_with_overrides(common);
      const Regime regime = parse_regime(regime_name);
      std::vector<double> grid = s.grid();
      Track track_i = s.targets.front().trajectory;
      Track track_j = s.targets.front().trajectory;
      double f_i = 0.0;
      double f_j = 0.0;
      if (!trajectory_path.empty()) {
        std::ifstream in(trajectory_path);
        if (!in) throw ParseError("cannot open trajectory file '" + trajectory_path + "'");
        SampledTrajectory sampled = read_trajectory_csv(in);
        grid = sampled.times;
        const TargetSpec& j = target_at(s, base_index);
        track_i = std::move(sampled);
        track_j = j.trajectory;
        f_j = tonal_or(j, 1000.0);
        f_i = tonal_i > 0.0 ? tonal_i : f_j;
      } else {
        if (pair.size() != 2) throw ValidationError("pair", "give --pair i,j or --trajectory");
        const TargetSpec& i = target_at(s, pair[0]);
        const TargetSpec& j = target_at(s, pair[1]);
        track_i = i.trajectory;
        track_j = j.trajectory;
        f_i = tonal_or(i, 1000.0);
        f_j = tonal_or(j, 1000.0);
      }
      const AmbiguityCertificate cert = verify_ambiguity(track_i, track_j, s.observer, f_i, f_j, s.c, grid,
                                                         s.tolerances, regime);
      nlohmann::json doc{{"certificate", to_json(cert)},
                         {"sufficiency", to_json(check_sufficiency(track_i, track_j, s.observer, f_i, f_j, s.c,
                                                                   grid, s.tolerances))}};
      emit_json(common.output, out, doc);
      return 0;
    }

    if (selftest->parsed()) {
      bool all = true;
      for (const auto& line : run_selftest(seed, trials)) {
        out << (line.pass ? "PASS " : "FAIL ") << line.name << " (" << line.detail << ")\n";
        all = all && line.pass;
      }
      return all ? 0 : 2;
    }
  } catch (const ValidationError& e) {
    err << "obskit: invalid input: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "obskit: " << e.what() << '\n';
    return 1;
  } catch (const AnalysisError& e) {
    err << "obskit: analysis failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "obskit: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace obskit
