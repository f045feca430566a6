#include "asbs/process.hpp"

#include <algorithm>

#include "asbs/parallel.hpp"

namespace asbs {

namespace {
constexpr std::size_t kShard = 128;

double drift_coeff(const BaseProcess& proc, double t) {
    // f_t(x) = c * x
    return proc.drift == DriftKind::Vp ? -0.5 * proc.schedule.beta(t) : 0.0;
}
}  // namespace

void BaseProcess::validate() const {
    schedule.validate();
    if ((drift == DriftKind::Vp) != (schedule.kind == ScheduleKind::Vp))
        throw std::invalid_argument("BaseProcess: VP drift requires the matched VP schedule");
    if (zcom && (n_particles == 0 || space_dim == 0 || n_particles * space_dim != prior.dim))
        throw std::invalid_argument("BaseProcess: bad ZCOM particle shape");
}

BaseProcess BaseProcess::brownian(NoiseSchedule sched, Prior prior) {
    BaseProcess p;
    p.drift = DriftKind::Zero;
    p.schedule = sched;
    p.prior = prior;
    p.validate();
    return p;
}

BaseProcess BaseProcess::brownian_zcom(NoiseSchedule sched, Prior prior, std::size_t n,
                                       std::size_t k) {
    BaseProcess p = brownian(sched, prior);
    p.zcom = true;
    p.n_particles = n;
    p.space_dim = k;
    p.validate();
    return p;
}

BaseProcess BaseProcess::vp(double beta_min, double beta_max, Prior prior) {
    BaseProcess p;
    p.drift = DriftKind::Vp;
    p.schedule = NoiseSchedule::vp(beta_min, beta_max);
    p.prior = prior;
    p.validate();
    return p;
}

Mat sample_prior(const BaseProcess& proc, Rng& rng, std::size_t count) {
    Mat x0 = proc.prior.sample(rng, count);
    if (proc.zcom)
        for (std::size_t i = 0; i < count; ++i) proc.project(x0.row(i));
    return x0;
}

Vec bridge_sample(const BaseProcess& proc, const Vec& x0, const Vec& x1, double t, Rng& rng) {
    if (proc.drift == DriftKind::Vp) return vp_bridge_sample(proc, x0, x1, t, rng);
    const double k10 = kappa(proc.schedule, 0.0, 1.0);
    const double kt0 = kappa(proc.schedule, 0.0, t);
    const double gamma = kt0 / k10;
    const double var = kt0 * kappa(proc.schedule, t, 1.0) / k10;
    const double sd = std::sqrt(std::max(0.0, var));
    Vec noise(x0.size());
    rng.normal_fill(noise.data(), noise.size());
    if (proc.zcom) proc.project(noise.data());
    Vec out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (1.0 - gamma) * x0[i] + gamma * x1[i] + sd * noise[i];
    return out;
}

Mat bridge_sample_batch(const BaseProcess& proc, const Mat& x0, const Mat& x1, const Vec& ts,
                        Rng& rng) {
    if (x0.rows != x1.rows || x0.cols != x1.cols || ts.size() != x0.rows)
        throw SizeMismatchError("bridge_sample_batch: shape mismatch");
    Mat out(x0.rows, x0.cols);
    for (std::size_t i = 0; i < x0.rows; ++i) {
        const Vec draw = bridge_sample(proc, x0.row_vec(i), x1.row_vec(i), ts[i], rng);
        std::copy(draw.begin(), draw.end(), out.row(i));
    }
    return out;
}

Vec base_score(const BaseProcess& proc, const Vec& x0, const Vec& x1) {
    if (proc.drift != DriftKind::Zero)
        throw UnsupportedBaseError("base_score: defined for the Brownian base (f = 0) only");
    if (x0.size() != x1.size()) throw SizeMismatchError("base_score: length mismatch");
    const double k10 = kappa(proc.schedule, 0.0, 1.0);
    Vec s(x0.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = -(x1[i] - x0[i]) / k10;
    return s;
}

std::pair<double, double> vp_coeffs(const BaseProcess& proc, double t) {
    if (proc.drift != DriftKind::Vp) throw UnsupportedBaseError("vp_coeffs: VP process only");
    const auto& s = proc.schedule;
    const double bt = s.beta(t);
    const double kt = std::exp(-0.25 * (1.0 - t) * (bt + s.beta_min));
    const double kbar = std::exp(-0.25 * t * (bt + s.beta_max));
    return {kt, kbar};
}

Vec vp_bridge_sample(const BaseProcess& proc, const Vec& x0, const Vec& x1, double t, Rng& rng) {
    const auto [kt, kbar_t] = vp_coeffs(proc, t);
    const double kbar_1 = vp_coeffs(proc, 1.0).second;
    const double denom = 1.0 - kbar_1 * kbar_1;
    const double c0 = kbar_t * (1.0 - kt * kt) / denom;
    const double c1 = kt * (1.0 - kbar_t * kbar_t) / denom;
    const double var = (1.0 - kt * kt) * (1.0 - kbar_t * kbar_t) / denom;
    const double sd = std::sqrt(std::max(0.0, var));
    Vec out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = c0 * x0[i] + c1 * x1[i] + sd * rng.normal();
    return out;
}

SimResult simulate(const BaseProcess& proc, const ControlFn& control, const SdeConfig& sde,
                   Rng& rng, std::size_t count) {
    proc.validate();
    sde.validate();
    const std::size_t d = proc.dim();
    SimResult res;
    res.x0 = sample_prior(proc, rng, count);
    res.x1 = Mat(count, d);
    if (sde.record_trajectory)
        res.trajectory.assign(sde.n_steps + 1, Mat(count, d));

    const std::uint64_t shard_base = rng.raw();
    const std::size_t n_shards = count == 0 ? 0 : (count + kShard - 1) / kShard;
    const int n_steps = sde.n_steps;
    const double dt = 1.0 / n_steps;

    parallel_for(n_shards, [&](std::size_t si) {
        const std::size_t lo = si * kShard;
        const std::size_t hi = std::min(count, lo + kShard);
        const std::size_t n = hi - lo;
        Rng srng(derive_seed(shard_base, si));
        Mat x(n, d), u(n, d);
        for (std::size_t i = 0; i < n; ++i)
            std::copy(res.x0.row(lo + i), res.x0.row(lo + i) + d, x.row(i));
        if (sde.record_trajectory)
            for (std::size_t i = 0; i < n; ++i)
                std::copy(x.row(i), x.row(i) + d, res.trajectory[0].row(lo + i));
        Vec noise(d);
        for (int step = 0; step < n_steps; ++step) {
            const double t = static_cast<double>(step) * dt;
            const double sig = sigma(proc.schedule, t);
            const double fc = drift_coeff(proc, t);
            const double noise_sd =
                std::sqrt(kappa(proc.schedule, t, static_cast<double>(step + 1) * dt));
            control(t, x, u);
            for (std::size_t i = 0; i < n; ++i) {
                if (proc.zcom) proc.project(u.row(i));
                srng.normal_fill(noise.data(), d);
                if (proc.zcom) proc.project(noise.data());
                double* xi = x.row(i);
                const double* ui = u.row(i);
                for (std::size_t j = 0; j < d; ++j)
                    xi[j] += (fc * xi[j] + sig * ui[j]) * dt + noise_sd * noise[j];
                for (std::size_t j = 0; j < d; ++j)
                    if (!std::isfinite(xi[j]) || std::abs(xi[j]) > 1e12)
                        throw NonFiniteError("simulate: state diverged at step " +
                                             std::to_string(step) + " (t=" + std::to_string(t) +
                                             ")");
            }
            if (sde.record_trajectory)
                for (std::size_t i = 0; i < n; ++i)
                    std::copy(x.row(i), x.row(i) + d, res.trajectory[step + 1].row(lo + i));
        }
        for (std::size_t i = 0; i < n; ++i)
            std::copy(x.row(i), x.row(i) + d, res.x1.row(lo + i));
    });
    return res;
}

Mat langevin_sample(const EnergyModel& energy, double step_size, std::int64_t n_steps,
                    const Prior& init, Rng& rng, std::size_t count, std::int64_t thin) {
    if (!(step_size > 0.0)) throw std::invalid_argument("langevin_sample: step_size > 0");
    const std::size_t d = energy.dim;
    Mat x0 = init.sample(rng, count);
    if (energy.zcom)
        for (std::size_t i = 0; i < count; ++i)
            zcom_project_inplace(x0.row(i), energy.n_particles, energy.space_dim);

    const std::size_t kept_per_chain = thin > 0 ? static_cast<std::size_t>(n_steps / thin) : 0;
    Mat out(count * (kept_per_chain + 1), d);
    const std::uint64_t shard_base = rng.raw();
    const std::size_t n_shards = count == 0 ? 0 : (count + kShard - 1) / kShard;
    const double noise_sd = std::sqrt(2.0 * step_size);

    parallel_for(n_shards, [&](std::size_t si) {
        const std::size_t lo = si * kShard;
        const std::size_t hi = std::min(count, lo + kShard);
        Rng srng(derive_seed(shard_base, si));
        Vec x(d), noise(d);
        for (std::size_t i = lo; i < hi; ++i) {
            std::copy(x0.row(i), x0.row(i) + d, x.begin());
            std::size_t kept = 0;
            for (std::int64_t step = 1; step <= n_steps; ++step) {
                const Vec g = energy_grad(energy, x);
                srng.normal_fill(noise.data(), d);
                if (energy.zcom)
                    zcom_project_inplace(noise.data(), energy.n_particles, energy.space_dim);
                for (std::size_t j = 0; j < d; ++j)
                    x[j] += -step_size * g[j] + noise_sd * noise[j];
                if (!all_finite(x)) throw NonFiniteError("langevin_sample: diverged");
                if (thin > 0 && step % thin == 0 && kept < kept_per_chain) {
                    std::copy(x.begin(), x.end(),
                              out.row(count + i * kept_per_chain + kept));
                    ++kept;
                }
            }
            std::copy(x.begin(), x.end(), out.row(i));
        }
    });
    return out;
}

}  // namespace asbs
