#pragma once

#include "mfpid/mixture.hpp"
#include "mfpid/rng.hpp"
#include "mfpid/schedule.hpp"
#include "mfpid/score.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mfpid {

enum class GuidanceMode {
    MfLinear,      // nu = linear interpolant of the endpoint means
    IaZero,        // nu = 0
    IaTargetMean,  // nu = target mean
    Fixed,         // nu = config.fixed_centre
    ClosedLoop,    // MF coefficients, batch mean substituted for nu_t
    Piecewise      // nu_i = config.centres row i
};

[[nodiscard]] std::string to_string(GuidanceMode m);
[[nodiscard]] GuidanceMode parse_mode(const std::string& s);

struct SimConfig {
    GaussianMixture target;
    PwcSchedule schedule;
    std::optional<GaussianMixture> initial;  // empty: delta at the origin
    GuidanceMode mode = GuidanceMode::MfLinear;
    std::size_t batch = 8000;
    int n_steps = 2500;
    std::uint64_t seed = 20250101;
    int workers = 1;
    bool midpoint = false;                // evaluate the drift at t + dt/2
    std::size_t trajectory_paths = 0;     // at most 50 recorded
    std::vector<double> snapshot_times{}; // positions kept at these grid times
    Vec fixed_centre{};
    Mat centres{};

    [[nodiscard]] int dim() const { return target.dim(); }
};

// Throws ValidationError on the first problem.
void validate(const SimConfig& cfg);

// Per-interval guidance centres implied by the mode.
[[nodiscard]] Mat guidance_centres(const SimConfig& cfg);

struct EnsembleState {
    Mat x;                          // d x B
    Mat z;                          // start points, d x B
    std::vector<int> labels;        // initial component
    std::vector<double> energy;     // int |u|^2 dt so far
    Mat zone_energy;                // same, per coordinate
    std::vector<CounterRng> rng;
    int step = 0;
};

[[nodiscard]] EnsembleState sample_initial(const SimConfig& cfg);

// Drift evaluation time for step n of N, clipped away from the endpoints.
[[nodiscard]] double eval_time(int n, int n_steps, bool midpoint);

// One Euler-Maruyama step for every particle (single thread).
void step(EnsembleState& state, const ScoreContext& ctx, const SimConfig& cfg);

struct TerminalStats {
    std::size_t count = 0;
    Vec mean, std;
};

struct EnergyReport {
    GuidanceMode mode = GuidanceMode::MfLinear;
    bool attribution_initial = false;   // which labels the headline split uses
    double total = 0.0;
    double total_stderr = 0.0;
    std::vector<double> energy_initial, stderr_initial, fraction_initial;
    std::vector<double> energy_terminal, stderr_terminal, fraction_terminal;
    std::vector<double> time;           // N + 1 grid times
    std::vector<double> power;          // P at each step, N entries
    std::vector<double> cumulative;     // E(t_n), N + 1 entries
    Mat mean_trace, std_trace;          // d x (N + 1)
    Vec zone_energy;                    // per coordinate
    std::vector<TerminalStats> terminal;     // grouped by terminal basin
    std::vector<double> particle_energy;
    std::vector<int> initial_labels, terminal_labels;
    std::vector<std::size_t> path_ids;
    std::vector<Mat> paths;             // d x (N + 1) each
    std::vector<Mat> snapshots;         // d x B at snapshot_times
    Mat starts, final_positions;        // d x B
    double wall_seconds = 0.0;

    [[nodiscard]] const std::vector<double>& headline_energy() const {
        return attribution_initial ? energy_initial : energy_terminal;
    }
};

[[nodiscard]] EnergyReport run_bridge(const SimConfig& cfg);

// Ensemble mean at interval midpoints under piecewise guidance (for the fixed point).
[[nodiscard]] Mat midpoint_means(const SimConfig& cfg, const Mat& centres);

[[nodiscard]] FixedPointResult run_fixed_point(const SimConfig& cfg, double tol, int max_iter);

} // namespace mfpid
