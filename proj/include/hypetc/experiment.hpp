#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypetc/gains.hpp"
#include "hypetc/hyperbolic.hpp"
#include "hypetc/kernels.hpp"
#include "hypetc/petc.hpp"
#include "hypetc/saint_venant.hpp"
#include "hypetc/stc.hpp"
#include "hypetc/trigger.hpp"

namespace hypetc {

enum class Mode { OpenLoop, Ctc, Cetc, Petc, Stc };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);  // throws InvalidConfig

/// Constant-coefficient plant given directly in canonical form.
struct RawPlant {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double q = 0.5;
    double rho = 0.5;
    double ell = 1.0;

    PlantCoefficients coefficients() const;
};

/// Two sine profiles a sin(k pi x / ell); (H~, V~) for a canal, (u, v) otherwise.
struct InitialCondition {
    double first_amplitude = -1.0;
    double first_mode = 1.0;
    double second_amplitude = 0.5;
    double second_mode = 3.0;
    bool observer_matches_plant = false;  // default: observer starts at zero
};

struct PetcInputs {
    std::optional<double> h = 0.13;  // explicit period; otherwise h_frac * tau
    double h_frac = 1.0;
};

struct StcInputs {
    double delta_bar = 1e-4;
    double phi_u = 8.6872;
    double phi_v = 3.1664;
    StcOptions options;
};

struct RunConfig {
    Mode mode = Mode::Cetc;
    std::optional<CanalConfig> canal = CanalConfig{};
    std::optional<RawPlant> raw;
    EtcParams etc;
    PetcInputs petc;
    StcInputs stc;
    SimConfig sim{1e-4, 201, 50.0};
    KernelSolverOptions kernel;
    InitialCondition initial;
    std::filesystem::path out_dir = "results";
    std::size_t stride = 100;
    std::vector<double> probes = {0.0, 2.5, 5.0, 7.5, 10.0};
    bool dump_kernels = false;

    /// Throws InvalidConfig (or a module error) before any solve.
    void validate() const;
};

/// Reference configuration of the canal study.
RunConfig default_config();

/// JSON text to config; missing keys keep their defaults. Throws InvalidConfig.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& config);

/// Everything derived from the configuration before time stepping.
struct Design {
    std::optional<LinearizedModel> model;
    PlantCoefficients coeffs;
    KernelSet K, P, L, R;
    GainProfiles gains;
    DesignConstants consts;
    StcConstants stc;
    PetcConfig petc;
    std::vector<std::string> warnings;
};

Design prepare(const RunConfig& config);

/// Flat key/value report of all scalar constants, as JSON text.
std::string constants_json(const Design& design, const RunConfig& config);

struct TrajectoryRow {
    double t = 0.0;
    double norm_plant = 0.0;
    double norm_observer = 0.0;
    double norm_error = 0.0;
    double U_held = 0.0;
    double U_continuous = 0.0;
    double d = 0.0;
    double m = 0.0;
    double gamma_c = 0.0;
};

struct RunSummary {
    Mode mode = Mode::Cetc;
    std::size_t steps = 0;
    double dt = 0.0;
    double t_end = 0.0;
    double tau = 0.0;
    double h = 0.0;
    double transit = 0.0;
    std::vector<EventRecord> events;
    double min_dwell = 0.0;   // over gaps k >= 1; NaN when fewer than two events
    double mean_dwell = 0.0;
    double initial_norm = 0.0;
    double final_norm = 0.0;
    double min_norm_ratio = 0.0;
    std::optional<double> time_to_1pct;
    double initial_error_norm = 0.0;
    double max_error_ratio_after_transit = 0.0;  // t >= transit + 0.5 s
    double max_gamma_c = 0.0;  // after any reset, over every step
    double max_m = 0.0;
    double min_H = 0.0;        // canal runs only
    std::size_t gate_clamps = 0;
    double max_error_mismatch = 0.0;  // max |(plant - observer) - error| over every step
    std::uint64_t error_digest = 0;  // hash of the error trajectory, every step
    std::vector<TrajectoryRow> trajectory;  // every stride-th step plus the last
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

/// Solves the kernels, simulates to t_end and writes all files (unless out_dir is empty).
RunSummary run_scenario(const RunConfig& config);
RunSummary run_scenario(const RunConfig& config, const Design& design);

struct CompareRow {
    Mode mode = Mode::Cetc;
    std::size_t events = 0;
    double mean_dwell = 0.0;
    double min_dwell = 0.0;
    std::optional<double> time_to_1pct;
    double final_norm_ratio = 0.0;
};

/// Runs every config (they must share plant, initial data and clock). Throws ConfigMismatch.
std::vector<CompareRow> compare_modes(const std::vector<RunConfig>& configs,
                                      std::vector<RunSummary>* summaries = nullptr);

void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows);

}  // namespace hypetc
