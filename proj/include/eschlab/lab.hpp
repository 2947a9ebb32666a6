#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eschlab/esfem.hpp"
#include "eschlab/geometry.hpp"
#include "eschlab/model.hpp"
#include "eschlab/sharp.hpp"

namespace eschlab {

enum class Comparison { None, SharpInterval, SharpCaps };

std::string_view to_string(Comparison c);

struct DomainSpec {
  enum class Kind { Interval, SphereTangential, DeformingSphere };
  Kind kind = Kind::Interval;
  IntervalKind interval = IntervalKind::Stationary;
  double vbar = 0.0;  ///< tangential sphere only

  Domain build() const;
  bool operator==(const DomainSpec&) const = default;
};

/// A named experiment: domain, model, initial data, horizon and the eps (and
/// mbar) values to sweep. params.epsilon and params.mbar hold the first
/// entries of the lists.
struct ExperimentPreset {
  std::string name;
  DomainSpec domain;
  ModelParams params;
  std::vector<double> mbar_list;
  InitialCondition initial;
  double t_end = 1.0;
  std::vector<double> output_times;
  std::vector<double> epsilon_list;
  Comparison comparison = Comparison::None;
  /// initial sharp interface for SharpInterval comparisons
  double sharp_lambda0 = 0.5;
  IntervalOrientation sharp_orientation = IntervalOrientation::MinusPlus;
  std::optional<double> dt;
  std::optional<std::size_t> n_cells;
  std::string out_dir = "out";

  bool operator==(const ExperimentPreset&) const = default;
};

const std::vector<std::string>& preset_names();

/// Throws ConfigError for unknown names.
ExperimentPreset builtin_preset(std::string_view name);

/// Flat key=value text; '#' starts a comment. Lists are comma separated.
/// Throws ConfigError with the offending line number.
ExperimentPreset parse_config(std::string_view text);

/// Inverse of parse_config: parse_config(render_config(p)) == p.
std::string render_config(const ExperimentPreset& preset);

/// Sharp-interface companion solution of a preset.
struct SharpResult {
  std::optional<CapTrajectory> caps;
  std::optional<IntervalTrajectory> interval;
  SphereModelParams cap_params;
  /// S (u_b - u_a): sharp energy per unit interface length (per interface in 1D)
  double tension = 0.0;

  const std::optional<SharpEvent>& event() const;
  /// Interface positions at t (empty when no companion or t is out of range).
  std::vector<double> interfaces_at(double t) const;
  /// Sharp energy at t; after a vanishing-cap event the surviving cap is frozen.
  std::optional<double> energy_at(double t) const;
};

SharpResult run_sharp(const ExperimentPreset& preset);

struct PhaseFieldRun {
  double epsilon = 0.0;
  double mbar = 1.0;
  Resolution resolution;
  RunResult result;
  /// relative drift |M(t) - M(0)| / max(|M(0)|, int |u0|), worst over all steps
  double mass_drift = 0.0;
  std::string error;  ///< solver diagnostic; empty on success

  bool ok() const { return error.empty(); }
};

/// Runs the phase-field model for one (eps, mbar) pair of the preset.
PhaseFieldRun run_phase_field(const ExperimentPreset& preset, double epsilon, double mbar);

struct SummaryRow {
  double epsilon = 0.0;
  double mbar = 1.0;
  double final_time = 0.0;
  std::vector<double> interfaces;
  /// |phase-field - sharp| final interface position; +inf when the counts differ
  std::optional<double> interface_error;
  /// max over trace times of |E_eps - E_0|
  std::optional<double> max_energy_gap;
  double mass_drift = 0.0;
  std::string status;
};

std::vector<SummaryRow> summary_rows(const std::vector<PhaseFieldRun>& runs,
                                     const SharpResult& sharp);

/// Interface errors below this are round-off, reported as zero.
inline constexpr double kInterfaceErrorFloor = 1e-9;

struct SweepReport {
  std::vector<SummaryRow> rows;  ///< ordered by decreasing eps
  bool interface_errors_decreasing = false;
  bool energy_gaps_decreasing = false;
};

/// Needs at least two runs (InvalidParamsError otherwise).
SweepReport sweep_report(const std::vector<PhaseFieldRun>& runs, const SharpResult& sharp);

struct RunOptions {
  bool write_files = true;
  bool gnuplot = false;
  bool parallel = true;
};

struct PresetOutcome {
  int exit_code = 0;  ///< 0 ok, 2 solver failure, 3 sharp singular event before t_end
  std::string diagnostic;
  std::vector<PhaseFieldRun> runs;
  SharpResult sharp;
  std::vector<SummaryRow> summary;
};

PresetOutcome run_preset(const ExperimentPreset& preset, const RunOptions& options = {});

/// Snapshot file name: <preset>_t<time with 4 decimals>.csv
std::string snapshot_file_name(std::string_view preset, double t);

}  // namespace eschlab
