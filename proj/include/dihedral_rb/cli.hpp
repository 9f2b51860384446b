// Copyright 2026 The dihedral-rb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The `run` and `verify` verbs of the command-line tool.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dihedral_rb/config.hpp"
#include "dihedral_rb/errors.hpp"
#include "dihedral_rb/estimation.hpp"
#include "dihedral_rb/protocol.hpp"
#include "dihedral_rb/report.hpp"

namespace dihedral_rb::cli {

enum ExitCode : int { kOk = 0, kConfigInvalid = 2, kFitFailed = 3, kUnphysical = 4 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "DIHEDRAL_RB_OUT_DIR";

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> lengths;
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> threads;
};

inline std::filesystem::path resolve_output(const std::string& path, const RunOverrides& o) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  if (o.out_dir) return *o.out_dir / p;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return std::filesystem::path(env) / p;
  return p;
}

inline std::filesystem::path reference_path(const std::filesystem::path& data_path) {
  auto p = data_path;
  p.replace_filename(data_path.stem().string() + ".reference" + data_path.extension().string());
  return p;
}

/// The D_j benchmark that accompanies an interleaved run: same plan, no
/// interleaved gate, independent random stream.
inline ExperimentPlan reference_plan(const ExperimentPlan& plan) {
  ExperimentPlan ref = plan;
  ref.mode = Mode::standard;
  ref.noise.target_error.reset();
  ref.stream = 0;
  return ref;
}

inline ExperimentPlan interleaved_plan(const ExperimentPlan& plan) {
  ExperimentPlan il = plan;
  il.mode = Mode::interleaved;
  il.stream = 1;
  return il;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

inline std::string csv_text(const DecayDataset& d) {
  std::ostringstream s;
  write_decay_csv(s, d);
  return s.str();
}

/// Maps exceptions onto exit codes with a `error[<category>]: ...` line.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error[config]: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const InvalidInput& e) {
    err << "error[config]: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const UnphysicalModel& e) {
    err << "error[unphysical]: " << e.what() << '\n';
    return kUnphysical;
  } catch (const FitFailure& e) {
    err << "error[fit]: " << e.what() << " (iterations " << e.iterations() << ", residual " << e.residual_norm()
        << ")\n";
    return kFitFailed;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error[config]: " << e.what() << '\n';
    return kConfigInvalid;
  }
}

inline ExperimentConfig load_with_overrides(const std::filesystem::path& config, const RunOverrides& o) {
  ExperimentConfig cfg = load_config(config);
  if (o.seed) cfg.plan.seed = *o.seed;
  if (o.lengths) cfg.plan.lengths = *o.lengths;
  if (o.threads) cfg.plan.threads = *o.threads;
  return cfg;
}

/// Schema, physicality and group-membership checks without simulating.
inline int verify(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_config(config);
    std::vector<ExperimentPlan> plans;
    if (cfg.plan.mode == Mode::interleaved) {
      plans = {reference_plan(cfg.plan), interleaved_plan(cfg.plan)};
    } else {
      plans = {cfg.plan};
    }
    for (const auto& p : plans) {
      p.validate();
      NoisyGateTable table(p);  // builds and CPTP-checks every noisy gate
    }
    out << "ok: " << config.string() << " (j=" << cfg.plan.j << ", mode=" << mode_name(cfg.plan.mode) << ")\n";
    return static_cast<int>(kOk);
  });
}

inline int run(const std::filesystem::path& config, const RunOverrides& overrides, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_with_overrides(config, overrides);
    const auto data_path = resolve_output(cfg.data_path, overrides);
    const auto report_path = resolve_output(cfg.report_path, overrides);
    FitOptions fit_options;
    fit_options.bootstrap_resamples = cfg.bootstrap_resamples;
    fit_options.seed = cfg.plan.seed;

    nlohmann::json report;
    if (cfg.plan.mode == Mode::standard) {
      const DecayDataset data = decay_dataset(cfg.plan);
      write_file(data_path, csv_text(data));
      const FitReport fit = fit_dataset(data, fit_options);
      report = standard_report(data, fit);
      out << "F_avg = " << format_double(fit.fidelity) << " +- " << format_double(fit.fidelity_err) << '\n';
    } else {
      const DecayDataset ref_data = decay_dataset(reference_plan(cfg.plan));
      const DecayDataset il_data = decay_dataset(interleaved_plan(cfg.plan));
      write_file(reference_path(data_path), csv_text(ref_data));
      write_file(data_path, csv_text(il_data));
      const FitReport ref_fit = fit_dataset(ref_data, fit_options);
      const FitReport combined = assemble_interleaved(ref_fit, fit_dataset(il_data, fit_options));
      report = interleaved_report(ref_data, ref_fit, il_data, combined);
      const auto& b = combined.interleaved->bound;
      out << "F_ref = " << format_double(ref_fit.fidelity) << ", F_composite = " << format_double(combined.fidelity)
          << ", F_T = " << format_double(b.fidelity_point) << " in [" << format_double(b.fidelity_low) << ", "
          << format_double(b.fidelity_high) << "]\n";
    }
    write_file(report_path, report.dump(2) + "\n");
    out << "wrote " << data_path.string() << " and " << report_path.string() << '\n';
    return static_cast<int>(kOk);
  });
}

}  // namespace dihedral_rb::cli
