#include "asbs/schedule.hpp"

#include <cmath>

namespace asbs {

NoiseSchedule NoiseSchedule::constant(double sigma) {
    NoiseSchedule s;
    s.kind = ScheduleKind::Constant;
    s.sigma = sigma;
    s.validate();
    return s;
}

NoiseSchedule NoiseSchedule::geometric(double beta_min, double beta_max) {
    NoiseSchedule s;
    s.kind = ScheduleKind::Geometric;
    s.beta_min = beta_min;
    s.beta_max = beta_max;
    s.validate();
    return s;
}

NoiseSchedule NoiseSchedule::vp(double beta_min, double beta_max) {
    NoiseSchedule s;
    s.kind = ScheduleKind::Vp;
    s.beta_min = beta_min;
    s.beta_max = beta_max;
    s.validate();
    return s;
}

void NoiseSchedule::validate() const {
    if (kind == ScheduleKind::Constant) {
        if (!(sigma > 0.0)) throw std::invalid_argument("NoiseSchedule: sigma must be > 0");
    } else {
        if (!(beta_max > beta_min && beta_min > 0.0))
            throw std::invalid_argument("NoiseSchedule: need beta_max > beta_min > 0");
    }
}

double NoiseSchedule::beta(double t) const {
    return (1.0 - t) * beta_max + t * beta_min;
}

double sigma(const NoiseSchedule& s, double t) {
    switch (s.kind) {
        case ScheduleKind::Constant:
            return s.sigma;
        case ScheduleKind::Geometric: {
            const double ratio = s.beta_max / s.beta_min;
            return s.beta_min * std::pow(ratio, 1.0 - t) * std::sqrt(2.0 * std::log(ratio));
        }
        case ScheduleKind::Vp:
            return std::sqrt(s.beta(t));
    }
    return 0.0;
}

double kappa(const NoiseSchedule& s, double s_lo, double t_hi) {
    switch (s.kind) {
        case ScheduleKind::Constant:
            return s.sigma * s.sigma * (t_hi - s_lo);
        case ScheduleKind::Geometric: {
            const double q = s.beta_min / s.beta_max;
            return s.beta_max * s.beta_max *
                   (std::pow(q, 2.0 * s_lo) - std::pow(q, 2.0 * t_hi));
        }
        case ScheduleKind::Vp:
            // beta is linear in t, so the trapezoid form is exact
            return 0.5 * (s.beta(s_lo) + s.beta(t_hi)) * (t_hi - s_lo);
    }
    return 0.0;
}

std::string schedule_kind_name(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::Constant: return "constant";
        case ScheduleKind::Geometric: return "geometric";
        case ScheduleKind::Vp: return "vp";
    }
    return "?";
}

}  // namespace asbs
