#pragma once

#include "mfpid/mixture.hpp"
#include "mfpid/simulate.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mfpid {

// One endpoint law as written in a config.
//   means:      one entry per component, each 1 value (broadcast to d) or d values
//   zone_shift: per component, mean += shift * z with z_j = sin(2 pi j / d)
//   offset:     per component, initial mean = target mean + offset (used when means is empty)
struct MixtureSpec {
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<double> sigmas;
    std::vector<double> zone_shift;
    std::vector<double> offset;
    double ar_rho = 0.0;
};

struct ExperimentConfig {
    std::string name = "custom";
    std::string family = "explicit";  // explicit | k-sweep
    int dimension = 1;
    bool delta_start = false;
    MixtureSpec initial, target;

    // k-sweep family: K means evenly on [range_lo, range_hi], weights ~ (K, ..., 1)
    int components = 2;
    double range_lo = -1.0, range_hi = 2.0;
    double displacement = 4.0;
    double sigma_in = 0.5, sigma_tar = 0.2;

    double beta0 = 12.0, gamma = 0.65;
    int intervals = 8;

    std::size_t batch = 8000;
    int steps = 2500;
    std::uint64_t seed = 20250101;
    int workers = 1;
    bool midpoint = false;
    int paths = 50;

    std::vector<std::string> modes{"ia0", "iam", "mf"};
    std::string sweep_axis = "none";  // none | dimension | components | ar-rho
    std::vector<double> sweep_values;
    bool parallel = false;

    // scalar LQG example
    double kappa = 0.8, q = 2.0, lqg_m_tar = 1.5, lqg_sigma_tar = 0.3;
    std::vector<double> m_bar_grid;

    double fp_tol = 2e-4;
    int fp_max_iter = 15;
};

[[nodiscard]] std::vector<std::string> preset_names();
[[nodiscard]] ExperimentConfig preset(const std::string& name);

// Flat "key = value" text (dotted keys, # comments) or JSON, detected by the
// first non-blank character. Unknown keys are rejected with line/field context.
[[nodiscard]] ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                                            ExperimentConfig base = {});
[[nodiscard]] ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

// Config as nested JSON using the same key names the parser accepts.
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& cfg);

struct Endpoints {
    std::optional<GaussianMixture> initial;
    GaussianMixture target;
};

[[nodiscard]] Endpoints build_endpoints(const ExperimentConfig& cfg);
[[nodiscard]] PwcSchedule build_schedule(const ExperimentConfig& cfg);
[[nodiscard]] SimConfig sim_config(const ExperimentConfig& cfg, GuidanceMode mode);

// The config with the sweep axis set to `value`.
[[nodiscard]] ExperimentConfig at_sweep_point(const ExperimentConfig& cfg, double value);

// Structural checks plus a dry run of coefficient construction and a K_t scan.
// Empty result means the config is usable.
[[nodiscard]] std::vector<std::string> validate_config(const ExperimentConfig& cfg);

} // namespace mfpid
