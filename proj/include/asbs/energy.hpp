#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "asbs/common.hpp"
#include "asbs/rng.hpp"

namespace asbs {

enum class EnergyFamily { MW, DW4, LJ, GMM40, Gauss };

std::string family_name(EnergyFamily f);

// Whole-vector L2 clipping. alpha_max <= 0 disables clipping.
struct GradClipRule {
    double alpha_max = 0.0;
};

Vec clip_grad(const Vec& g, const GradClipRule& rule);

// Removes the per-coordinate particle mean (projection onto the zero
// center-of-mass subspace, A = (I_n - 1/n 11^T) (x) I_k).
void zcom_project_inplace(double* x, std::size_t n, std::size_t k);
Vec zcom_project(const Vec& x, std::size_t n, std::size_t k);

struct EnergyModel {
    EnergyFamily family = EnergyFamily::MW;
    std::size_t dim = 0;
    std::size_t n_particles = 0;  // 0 for non-particle families
    std::size_t space_dim = 0;
    bool zcom = false;

    // MW
    double mw_delta = 4.0;
    // DW-4
    double dw_a = 0.0, dw_b = -4.0, dw_c = 0.9, dw_d0 = 1.0, dw_tau = 1.0;
    bool dw4_exponentiated = false;  // literal printed formula, off by default
    // LJ
    double lj_rm = 1.0, lj_eps = 1.0, lj_c = 0.5, lj_tau = 1.0;
    bool lj_flip_sign = false;  // conventional repulsive-core variant
    // GMM40
    std::uint64_t gmm_seed = 0;
    double gmm_std = 1.0;
    double gmm_box = 40.0;
    Mat gmm_centers;  // 40 x 2, materialized at construction
    // Gauss
    double gauss_mean = 0.0, gauss_var = 1.0;

    static EnergyModel mw(std::size_t dim = 5, double delta = 4.0);
    static EnergyModel dw4();
    static EnergyModel lj(std::size_t n_particles);
    static EnergyModel gmm40(std::uint64_t seed = 0, double mode_std = 1.0, double box = 40.0);
    static EnergyModel gauss(std::size_t dim, double mean, double var);

    std::uint64_t energy_calls() const { return counter_ ? counter_->load() : 0; }
    void reset_energy_calls() const { if (counter_) counter_->store(0); }
    void count_call() const { if (counter_) counter_->fetch_add(1, std::memory_order_relaxed); }

    std::shared_ptr<std::atomic<std::uint64_t>> counter_ =
        std::make_shared<std::atomic<std::uint64_t>>(0);
};

double energy_eval(const EnergyModel& m, const Vec& x);
// Exact analytic gradient; ZCOM-projected when m.zcom.
Vec energy_grad(const EnergyModel& m, const Vec& x);

// Exact draws from the 40-mode mixture: uniform mode choice + isotropic noise.
Mat gmm40_sample_truth(const EnergyModel& m, Rng& rng, std::size_t count);

}  // namespace asbs
