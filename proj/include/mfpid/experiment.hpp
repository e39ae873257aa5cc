#pragma once

#include "mfpid/config.hpp"
#include "mfpid/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mfpid {

struct ModeRun {
    GuidanceMode mode = GuidanceMode::MfLinear;
    EnergyReport report;
};

struct PointResult {
    ExperimentConfig cfg;
    double value = 0.0;          // sweep value (NaN without a sweep)
    std::vector<ModeRun> runs;
    double wall_seconds = 0.0;

    [[nodiscard]] const ModeRun* find(GuidanceMode m) const;
    // 100 (1 - E_mf / E_ia0); falls back to IA(target mean) when IA(0) was not run. NaN without MF.
    [[nodiscard]] double saving_percent() const;
    // Energy per coordinate.
    [[nodiscard]] double per_zone(GuidanceMode m) const;
};

// Runs every sweep point x mode. Writes artifacts under `out` when non-empty.
// Progress lines go to `log` when given.
[[nodiscard]] std::vector<PointResult> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                                      std::ostream* log = nullptr);

// Scalar TCL bridge table: t, S, Sigma, m_mf, s_mf, s_ia0, s_iam, P_*, E_*.
void write_lqg_csv(const ExperimentConfig& cfg, std::ostream& os, int n_points = 4001);
// Total energy of the IA baseline for each m_bar in the grid, next to MF.
void write_lqg_mbar_csv(const ExperimentConfig& cfg, std::ostream& os);

// Gridded marginal density per method at the given times (d = 1 only).
void write_density_csv(const ExperimentConfig& cfg, const std::vector<std::string>& modes,
                       const std::vector<double>& times, std::ostream& os, int n_grid = 401);

// Picard iteration on the MF guidance; one row per iteration with the max update
// and the residual against the linear interpolant at each midpoint.
FixedPointResult write_guidance_check_csv(const ExperimentConfig& cfg, std::ostream& os);

// Weighted least-squares fit u* ~ -S x - s over the particles at one time,
// pooled over coordinates. Returns (S, s, R^2).
struct AffineFit {
    double t = 0.0, S = 0.0, s = 0.0, r2 = 0.0;
};
[[nodiscard]] AffineFit affine_fit(const ScoreContext& ctx, double t, const Mat& x, const Mat& z);

} // namespace mfpid
