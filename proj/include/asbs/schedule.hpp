#pragma once

#include <string>

#include "asbs/common.hpp"

namespace asbs {

// Constant: sigma_t = sigma.
// Geometric: sigma_t = beta_min (beta_max/beta_min)^(1-t) sqrt(2 log(beta_max/beta_min)).
// Vp: sigma_t = sqrt(beta_t) with beta_t = (1-t) beta_max + t beta_min (decreasing).
enum class ScheduleKind { Constant, Geometric, Vp };

struct NoiseSchedule {
    ScheduleKind kind = ScheduleKind::Constant;
    double sigma = 0.2;        // Constant
    double beta_min = 0.001;   // Geometric / Vp
    double beta_max = 1.0;

    static NoiseSchedule constant(double sigma);
    static NoiseSchedule geometric(double beta_min, double beta_max);
    static NoiseSchedule vp(double beta_min, double beta_max);

    void validate() const;
    double beta(double t) const;  // Vp only
};

double sigma(const NoiseSchedule& s, double t);

// kappa_{t|s} = int_s^t sigma_tau^2 dtau, in closed form.
double kappa(const NoiseSchedule& s, double s_lo, double t_hi);

std::string schedule_kind_name(ScheduleKind k);

}  // namespace asbs
