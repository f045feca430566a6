#include "asbs/energy.hpp"

#include <algorithm>
#include <limits>

namespace asbs {

namespace {

constexpr double kMinPairDist = 1e-6;

double pair_dist(const double* xi, const double* xj, std::size_t k) {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double d = xi[c] - xj[c];
        s += d * d;
    }
    return std::sqrt(s);
}

void check_dim(const EnergyModel& m, const Vec& x) {
    if (x.size() != m.dim)
        throw SizeMismatchError("energy: expected dim " + std::to_string(m.dim) + ", got " +
                                std::to_string(x.size()));
}

// DW-4 pairwise sum S(x) = (1/2tau) sum_{i<j} a(d-d0) + b(d-d0)^2 + c(d-d0)^4
double dw4_sum(const EnergyModel& m, const Vec& x) {
    const std::size_t n = m.n_particles, k = m.space_dim;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = pair_dist(&x[i * k], &x[j * k], k);
            const double u = d - m.dw_d0;
            const double u2 = u * u;
            s += m.dw_a * u + m.dw_b * u2 + m.dw_c * u2 * u2;
        }
    }
    return s / (2.0 * m.dw_tau);
}

void dw4_sum_grad(const EnergyModel& m, const Vec& x, Vec& g) {
    const std::size_t n = m.n_particles, k = m.space_dim;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = pair_dist(&x[i * k], &x[j * k], k);
            if (d < kMinPairDist)
                throw NonFiniteError("dw4: pairwise distance below 1e-6");
            const double u = d - m.dw_d0;
            const double dg = (m.dw_a + 2.0 * m.dw_b * u + 4.0 * m.dw_c * u * u * u) /
                              (2.0 * m.dw_tau);
            const double f = dg / d;
            for (std::size_t c = 0; c < k; ++c) {
                const double dx = x[i * k + c] - x[j * k + c];
                g[i * k + c] += f * dx;
                g[j * k + c] -= f * dx;
            }
        }
    }
}

double lj_pair_term(const EnergyModel& m, double d) {
    const double u = m.lj_rm / d;
    const double u6 = u * u * u * u * u * u;
    const double u12 = u6 * u6;
    const double t = m.lj_flip_sign ? (u12 - u6) : (u6 - u12);
    return m.lj_eps / (2.0 * m.lj_tau) * t;
}

}  // namespace

std::string family_name(EnergyFamily f) {
    switch (f) {
        case EnergyFamily::MW: return "mw";
        case EnergyFamily::DW4: return "dw4";
        case EnergyFamily::LJ: return "lj";
        case EnergyFamily::GMM40: return "gmm40";
        case EnergyFamily::Gauss: return "gauss";
    }
    return "?";
}

Vec clip_grad(const Vec& g, const GradClipRule& rule) {
    if (rule.alpha_max <= 0.0) return g;
    const double n = norm2(g);
    if (n <= rule.alpha_max) return g;
    Vec out(g);
    const double s = rule.alpha_max / n;
    for (double& v : out) v *= s;
    return out;
}

void zcom_project_inplace(double* x, std::size_t n, std::size_t k) {
    for (std::size_t c = 0; c < k; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += x[i * k + c];
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) x[i * k + c] -= mean;
    }
}

Vec zcom_project(const Vec& x, std::size_t n, std::size_t k) {
    if (x.size() != n * k) throw SizeMismatchError("zcom_project: n*k != length");
    Vec out(x);
    zcom_project_inplace(out.data(), n, k);
    return out;
}

EnergyModel EnergyModel::mw(std::size_t dim, double delta) {
    EnergyModel m;
    m.family = EnergyFamily::MW;
    m.dim = dim;
    m.mw_delta = delta;
    return m;
}

EnergyModel EnergyModel::dw4() {
    EnergyModel m;
    m.family = EnergyFamily::DW4;
    m.n_particles = 4;
    m.space_dim = 2;
    m.dim = 8;
    m.zcom = true;
    return m;
}

EnergyModel EnergyModel::lj(std::size_t n_particles) {
    EnergyModel m;
    m.family = EnergyFamily::LJ;
    m.n_particles = n_particles;
    m.space_dim = 3;
    m.dim = 3 * n_particles;
    m.zcom = true;
    return m;
}

EnergyModel EnergyModel::gmm40(std::uint64_t seed, double mode_std, double box) {
    EnergyModel m;
    m.family = EnergyFamily::GMM40;
    m.dim = 2;
    m.gmm_seed = seed;
    m.gmm_std = mode_std;
    m.gmm_box = box;
    m.gmm_centers = Mat(40, 2);
    Rng rng(derive_seed(seed, 0x676d6d34ULL));
    for (std::size_t i = 0; i < 40; ++i) {
        m.gmm_centers(i, 0) = rng.uniform(-box, box);
        m.gmm_centers(i, 1) = rng.uniform(-box, box);
    }
    return m;
}

EnergyModel EnergyModel::gauss(std::size_t dim, double mean, double var) {
    EnergyModel m;
    m.family = EnergyFamily::Gauss;
    m.dim = dim;
    m.gauss_mean = mean;
    m.gauss_var = var;
    return m;
}

double energy_eval(const EnergyModel& m, const Vec& x) {
    check_dim(m, x);
    m.count_call();
    switch (m.family) {
        case EnergyFamily::MW: {
            double e = 0.0;
            for (double v : x) {
                const double t = v * v - m.mw_delta;
                e += t * t;
            }
            return e;
        }
        case EnergyFamily::DW4: {
            const double s = dw4_sum(m, x);
            return m.dw4_exponentiated ? std::exp(s) : s;
        }
        case EnergyFamily::LJ: {
            const std::size_t n = m.n_particles, k = m.space_dim;
            double e = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double d = pair_dist(&x[i * k], &x[j * k], k);
                    if (d < kMinPairDist)
                        throw NonFiniteError("lj: pairwise distance below 1e-6");
                    e += lj_pair_term(m, d);
                }
            }
            // harmonic oscillator about the center of mass
            Vec com(k, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < k; ++c) com[c] += x[i * k + c];
            for (double& v : com) v /= static_cast<double>(n);
            double osc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < k; ++c) {
                    const double d = x[i * k + c] - com[c];
                    osc += d * d;
                }
            return e + 0.5 * m.lj_c * osc;
        }
        case EnergyFamily::GMM40: {
            const double s2 = m.gmm_std * m.gmm_std;
            double max_l = -std::numeric_limits<double>::infinity();
            double ls[40];
            for (std::size_t j = 0; j < 40; ++j) {
                const double dx = x[0] - m.gmm_centers(j, 0);
                const double dy = x[1] - m.gmm_centers(j, 1);
                ls[j] = -(dx * dx + dy * dy) / (2.0 * s2);
                max_l = std::max(max_l, ls[j]);
            }
            double acc = 0.0;
            for (std::size_t j = 0; j < 40; ++j) acc += std::exp(ls[j] - max_l);
            const double log_norm = std::log(40.0) + std::log(6.283185307179586 * s2);
            return -(max_l + std::log(acc) - log_norm);
        }
        case EnergyFamily::Gauss: {
            double e = 0.0;
            for (double v : x) {
                const double d = v - m.gauss_mean;
                e += d * d;
            }
            return e / (2.0 * m.gauss_var);
        }
    }
    throw std::logic_error("energy_eval: unknown family");
}

Vec energy_grad(const EnergyModel& m, const Vec& x) {
    check_dim(m, x);
    m.count_call();
    Vec g(m.dim, 0.0);
    switch (m.family) {
        case EnergyFamily::MW: {
            for (std::size_t i = 0; i < x.size(); ++i)
                g[i] = 4.0 * x[i] * (x[i] * x[i] - m.mw_delta);
            break;
        }
        case EnergyFamily::DW4: {
            dw4_sum_grad(m, x, g);
            if (m.dw4_exponentiated) {
                const double e = std::exp(dw4_sum(m, x));
                for (double& v : g) v *= e;
            }
            break;
        }
        case EnergyFamily::LJ: {
            const std::size_t n = m.n_particles, k = m.space_dim;
            const double sign = m.lj_flip_sign ? -1.0 : 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double d = pair_dist(&x[i * k], &x[j * k], k);
                    if (d < kMinPairDist)
                        throw NonFiniteError("lj: pairwise distance below 1e-6");
                    const double u = m.lj_rm / d;
                    const double u6 = u * u * u * u * u * u;
                    const double u12 = u6 * u6;
                    // d/dxi of (u^6 - u^12) = (-6 u^6 + 12 u^12) (xi-xj)/d^2
                    const double f =
                        sign * m.lj_eps / (2.0 * m.lj_tau) * (-6.0 * u6 + 12.0 * u12) / (d * d);
                    for (std::size_t c = 0; c < k; ++c) {
                        const double dx = x[i * k + c] - x[j * k + c];
                        g[i * k + c] += f * dx;
                        g[j * k + c] -= f * dx;
                    }
                }
            }
            Vec com(k, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < k; ++c) com[c] += x[i * k + c];
            for (double& v : com) v /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < k; ++c)
                    g[i * k + c] += m.lj_c * (x[i * k + c] - com[c]);
            break;
        }
        case EnergyFamily::GMM40: {
            const double s2 = m.gmm_std * m.gmm_std;
            double ls[40];
            double max_l = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < 40; ++j) {
                const double dx = x[0] - m.gmm_centers(j, 0);
                const double dy = x[1] - m.gmm_centers(j, 1);
                ls[j] = -(dx * dx + dy * dy) / (2.0 * s2);
                max_l = std::max(max_l, ls[j]);
            }
            double z = 0.0;
            for (std::size_t j = 0; j < 40; ++j) {
                ls[j] = std::exp(ls[j] - max_l);
                z += ls[j];
            }
            for (std::size_t j = 0; j < 40; ++j) {
                const double w = ls[j] / z;
                g[0] += w * (x[0] - m.gmm_centers(j, 0)) / s2;
                g[1] += w * (x[1] - m.gmm_centers(j, 1)) / s2;
            }
            break;
        }
        case EnergyFamily::Gauss: {
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = (x[i] - m.gauss_mean) / m.gauss_var;
            break;
        }
    }
    if (!all_finite(g)) throw NonFiniteError("energy_grad: non-finite gradient");
    if (m.zcom) zcom_project_inplace(g.data(), m.n_particles, m.space_dim);
    return g;
}

Mat gmm40_sample_truth(const EnergyModel& m, Rng& rng, std::size_t count) {
    if (m.family != EnergyFamily::GMM40)
        throw std::invalid_argument("gmm40_sample_truth: not a GMM40 model");
    Mat out(count, 2);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = rng.uniform_index(40);
        out(i, 0) = m.gmm_centers(j, 0) + m.gmm_std * rng.normal();
        out(i, 1) = m.gmm_centers(j, 1) + m.gmm_std * rng.normal();
    }
    return out;
}

}  // namespace asbs
