#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "remest/dp_threshold.hpp"
#include "remest/simulator.hpp"

namespace remest {

/// Experiment description: flat typed key-value file with four sections
/// (model, solver, simulation, output). Unknown sections or keys are
/// rejected with field-level messages, as are guard violations, before any
/// computation starts. The canonical serialization is what gets hashed and
/// echoed next to every output.
struct ExperimentConfig {
    // [model]
    std::string source_kind = "ar1"; // ar1 | finite
    double a = 1.0;
    NoiseFamily noise = NoiseFamily::gaussian;
    double noise_scale = 1.0;
    std::string distortion_kind = "squared"; // squared | absolute | power | zero_one | matrix
    int distortion_power = 4;
    std::vector<std::vector<double>> distortion_matrix;
    double lambda = 1.0;
    std::vector<std::vector<double>> transition;
    std::vector<double> source_initial;
    std::vector<std::vector<double>> q{{0.5, 0.5}, {0.5, 0.5}};
    std::vector<double> channel_initial{0.5, 0.5};

    // [solver]
    std::size_t horizon = 10;
    double grid_half_width = 0.0; // 0 = derive from the model
    std::size_t grid_points = 4097;
    bool refine_thresholds = false;
    std::string backend = "analytic"; // analytic | quadrature
    int threads = 1;                  // 0 = hardware concurrency

    // [simulation]
    std::uint64_t n_reps = 10000;
    std::uint64_t seed = 1;
    std::uint64_t trajectories = 0; // episodes dumped to CSV by cmd_simulate

    // [output]
    std::string out_dir = "out";
    std::string formats = "json,csv";

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load_file(const std::string& path);

    /// Apply a "section.key=value" override (CLI flags route through here).
    void set(const std::string& dotted_key, const std::string& value);

    void validate() const;
    std::string canonical() const;
    std::string hash_hex() const;

    bool is_ar1() const { return source_kind == "ar1"; }
    Ar1Models ar1_models() const;
    FiniteModels finite_models() const;
    DistortionFn scalar_distortion() const;
    double effective_half_width() const;
    SolverGrid make_solver_grid() const;
    int effective_threads() const;
};

std::string toolkit_version();

} // namespace remest
