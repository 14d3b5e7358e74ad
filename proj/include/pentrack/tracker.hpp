// SPDX-License-Identifier: Apache-2.0
//
// Particle-filter recovery of the pencil trajectory from magnetometer
// readings. State is 6-dof: tip position on the screen plus the body
// orientation quaternion. Each step proposes movement (learned or
// constant-velocity prior plus Gaussian perturbation), weights particles by
// the gap between the measured field and the magnetic map in the particle's
// pencil frame, and resamples with a KLD-adaptive particle count. The
// recovered trace is the history of the heaviest particle after the final
// weighting.

#pragma once

#include "pentrack/geometry.hpp"
#include "pentrack/logs.hpp"
#include "pentrack/magmap.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace pentrack {

// x, y, qw, qx, qy, qz.
using StateVec = std::array<double, 6>;

// Affine map from the last three state deltas (zero-padded when the track
// is young) to the predicted next delta.
struct BehaviorModel {
    std::array<std::array<double, 19>, 6> coef{}; // per output: intercept, 18 weights
    bool ridge_fallback = false;

    // deltas[0..n-1], most recent last; n may be 0..3 (extra entries ignored).
    StateVec predict(const StateVec* deltas, std::size_t n) const;
};

// Least-squares fit over continuous tracks (no windows span track ends).
// Throws std::invalid_argument with fewer than 100 training windows.
BehaviorModel fit_behavior_model(const std::vector<std::vector<StateVec>>& tracks);

// Splits a pose log into continuous tracks at timestamp gaps, aligns
// quaternion hemispheres within each track.
std::vector<std::vector<StateVec>> tracks_from_poses(const PoseLog& poses,
                                                     double gap_s = 0.1);

// Inverse standard normal CDF; argument strictly inside (0, 1).
double normal_quantile(double p);

struct KldParams {
    double epsilon = 0.05;
    double delta = 0.01;
    std::size_t n_min = 500;
    double pos_bin_mm = 5.0;
    double quat_bin = 0.1;
};

// Particles needed so the sampled distribution stays within epsilon of the
// true one (confidence 1-delta) given k occupied bins; clamped to
// [n_min, n_max]. k of 0 or 1 gives n_min.
std::size_t kld_sample_size(std::size_t k, const KldParams& p, std::size_t n_max);

struct TrackerConfig {
    std::size_t n_init = 200000; // uniform draws before the first cut
    std::size_t n_max = 20000;   // particles kept after initialization
    double sigma_uT = 0.5;       // measurement noise scale in the weights
    double pos_noise_mm = 0.4;   // per-step position perturbation
    double quat_noise = 0.01;    // per-step quaternion component perturbation
    KldParams kld;
    std::size_t resample_batch = 1000;
    int max_redraws = 10; // attempts to keep a proposal inside the valid box

    // Full-scale settings sized for offline recovery quality.
    static TrackerConfig paper_scale() {
        TrackerConfig c;
        c.n_init = 5000000;
        c.n_max = 50000;
        return c;
    }
};

// Raised when every particle weight collapses to zero.
struct DegenerateWeights : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Struct-of-arrays particle storage; history carries each particle's full
// state sequence including the current state.
struct ParticleSet {
    std::vector<double> x, y, qw, qx, qy, qz, weight;
    std::vector<std::vector<StateVec>> history;

    std::size_t size() const { return x.size(); }
    StateVec state(std::size_t i) const {
        return {x[i], y[i], qw[i], qx[i], qy[i], qz[i]};
    }
};

// Uniform draws over the screen and the valid attitude box, ranked by
// residual against the first measurement; the best n_max survive with
// uniform weights. m_meas is the ambient-free field in the screen frame.
ParticleSet init_particles(const VoxelField& map, const ScreenConfig& screen,
                           Vec3 m_meas, const TrackerConfig& cfg,
                           std::mt19937_64& rng);

// Moves every particle one step: predicted delta plus Gaussian noise,
// redrawn while the proposal leaves the screen or the attitude box
// (clamped after max_redraws), then appended to the history.
void transition(ParticleSet& ps, const ScreenConfig& screen,
                const std::optional<BehaviorModel>& behavior,
                const TrackerConfig& cfg, std::mt19937_64& rng);

// Fills ps.weight from the magnetic map; throws DegenerateWeights when the
// whole cloud misses the map.
void compute_weights(ParticleSet& ps, const VoxelField& map,
                     const ScreenConfig& screen, Vec3 m_meas, double sigma);

// KLD-adaptive multinomial resampling in batches; weights reset to uniform.
void resample(ParticleSet& ps, const TrackerConfig& cfg, std::mt19937_64& rng);

struct TrackResult {
    Trace trace;                  // best particle's tip positions over time
    std::vector<StateVec> states; // best particle's full states
    std::size_t n_final = 0;      // particles alive at the end
    int restarts = 0;             // cloud collapses recovered by re-seeding
};

// Runs the filter over the mag samples inside one stroke interval. ambient
// is subtracted from each reading. On a total weight collapse the committed
// trace so far is kept and the cloud is re-seeded from the current reading.
TrackResult track_stroke(const VoxelField& map, const ScreenConfig& screen,
                         const MagLog& mag, const StrokeInterval& stroke,
                         Vec3 ambient, const std::optional<BehaviorModel>& behavior,
                         const TrackerConfig& cfg, std::uint64_t seed);

// Position-only variant against a screen-frame 2-D map: fixed-size cloud,
// systematic resampling, weighted-mean estimates.
TrackResult track_stroke_2d(const ScreenMap2D& map, const ScreenConfig& screen,
                            const MagLog& mag, const StrokeInterval& stroke,
                            Vec3 ambient, const TrackerConfig& cfg,
                            std::uint64_t seed);

} // namespace pentrack
