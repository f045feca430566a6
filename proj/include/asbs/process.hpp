#pragma once

#include <functional>
#include <optional>

#include "asbs/common.hpp"
#include "asbs/energy.hpp"
#include "asbs/prior.hpp"
#include "asbs/rng.hpp"
#include "asbs/schedule.hpp"

namespace asbs {

enum class DriftKind { Zero, Vp };

// Uncontrolled SDE dX = f_t dt + sigma_t dW with prior X_0 ~ mu.
// drift Vp means f_t(x) = -beta_t x / 2 and requires the matched Vp schedule.
struct BaseProcess {
    DriftKind drift = DriftKind::Zero;
    NoiseSchedule schedule;
    Prior prior;
    bool zcom = false;
    std::size_t n_particles = 0;
    std::size_t space_dim = 0;

    std::size_t dim() const { return prior.dim; }
    void validate() const;
    void project(double* x) const {
        if (zcom) zcom_project_inplace(x, n_particles, space_dim);
    }

    static BaseProcess brownian(NoiseSchedule sched, Prior prior);
    static BaseProcess brownian_zcom(NoiseSchedule sched, Prior prior, std::size_t n,
                                     std::size_t k);
    static BaseProcess vp(double beta_min, double beta_max, Prior prior);
};

struct SdeConfig {
    int n_steps = 100;
    bool record_trajectory = false;
    void validate() const {
        if (n_steps < 1) throw std::invalid_argument("SdeConfig: n_steps >= 1");
    }
};

// Samples the prior; ZCOM-projected when the process lives in that subspace.
Mat sample_prior(const BaseProcess& proc, Rng& rng, std::size_t count);

// One draw from p_base(X_t | X0, X1), t in (0, 1).
Vec bridge_sample(const BaseProcess& proc, const Vec& x0, const Vec& x1, double t, Rng& rng);

// Row-wise bridge draws at per-row times; noise is ZCOM-projected when needed.
Mat bridge_sample_batch(const BaseProcess& proc, const Mat& x0, const Mat& x1, const Vec& ts,
                        Rng& rng);

// grad_{x1} log p_base(X1 | X0) = -(x1 - x0)/kappa_{1|0}. Brownian base only.
Vec base_score(const BaseProcess& proc, const Vec& x0, const Vec& x1);

// (kappa_t, kappa_bar_t) for the linear-beta VP process.
std::pair<double, double> vp_coeffs(const BaseProcess& proc, double t);

Vec vp_bridge_sample(const BaseProcess& proc, const Vec& x0, const Vec& x1, double t, Rng& rng);

// Batch control; fills u with u_t(x) row per sample.
using ControlFn = std::function<void(double t, const Mat& x, Mat& u)>;

struct SimResult {
    Mat x0;
    Mat x1;
    std::vector<Mat> trajectory;  // n_steps+1 states when recorded
};

// Euler-Maruyama on dX = [f_t + sigma_t u_t(X)] dt + sigma_t dW, left-endpoint
// drift. Per-step noise variance uses the exact kappa increment so the
// uncontrolled terminal variance matches kappa_{1|0} for every step count.
// Paths run in fixed-size shards with seed-derived streams; results do not
// depend on the thread count.
SimResult simulate(const BaseProcess& proc, const ControlFn& control, const SdeConfig& sde,
                   Rng& rng, std::size_t count);

// Unadjusted Langevin: x <- x - step_size grad E + sqrt(2 step_size) xi.
// Returns final states; thin > 0 additionally keeps every thin-th state.
Mat langevin_sample(const EnergyModel& energy, double step_size, std::int64_t n_steps,
                    const Prior& init, Rng& rng, std::size_t count, std::int64_t thin = 0);

}  // namespace asbs
