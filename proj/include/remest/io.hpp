#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "remest/config.hpp"
#include "remest/dp_finite.hpp"
#include "remest/dp_threshold.hpp"
#include "remest/oracle.hpp"
#include "remest/simulator.hpp"

namespace remest {
namespace io {

using ordered_json = nlohmann::ordered_json;

/// "inf" for the never-transmit sentinel, %.17g otherwise.
std::string format_double(double v);

/// Provenance block carried by every artifact: toolkit version, config hash,
/// master seed.
std::string csv_header_block(const ExperimentConfig& cfg);
ordered_json meta_json(const ExperimentConfig& cfg);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
void ensure_dir(const std::string& dir);

std::string thresholds_csv(const ExperimentConfig& cfg, const ThresholdSchedule& sched);
ordered_json thresholds_json(const ExperimentConfig& cfg, const ThresholdSchedule& sched,
                             double initial_value, const StructureReport& report);
/// Parses a thresholds JSON artifact; returns the schedule and, when present,
/// the solver value through *initial_value.
ThresholdSchedule thresholds_from_json(const std::string& text, double* initial_value);

std::string value_grid_csv(const ExperimentConfig& cfg, const ValueGrid& vg);
ordered_json structure_json(const StructureReport& report);

ordered_json cost_json(const ExperimentConfig& cfg, const CostEstimate& est);
std::string trajectories_csv(const ExperimentConfig& cfg,
                             const std::vector<TrajectoryRecord>& episodes);

ordered_json finite_solution_json(const ExperimentConfig& cfg, const FiniteDPSolution& sol);
std::string finite_summary_csv(const ExperimentConfig& cfg, const FiniteDPSolution& sol);

ordered_json oracle_json(const ExperimentConfig& cfg, const oracle::SearchResult& result,
                         oracle::Granularity granularity);

/// Density export for plotting: grid point, value.
std::string density_csv(const GridDensity& density);

} // namespace io
} // namespace remest
