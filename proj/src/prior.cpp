#include "asbs/prior.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace asbs {

Prior Prior::gaussian(std::size_t dim, double mean, double stdev) {
    if (!(stdev > 0.0)) throw std::invalid_argument("Prior: stdev must be > 0");
    Prior p;
    p.kind = PriorKind::Gaussian;
    p.dim = dim;
    p.mean = mean;
    p.stdev = stdev;
    return p;
}

Prior Prior::dirac(std::size_t dim, double point) {
    Prior p;
    p.kind = PriorKind::Dirac;
    p.dim = dim;
    p.point = point;
    return p;
}

Prior Prior::harmonic(std::size_t n, std::size_t k, double alpha, double epsilon) {
    if (n < 2 || k == 0) throw std::invalid_argument("Prior: harmonic needs n >= 2, k >= 1");
    if (!(alpha > 0.0) || !(epsilon > 0.0))
        throw std::invalid_argument("Prior: harmonic needs alpha, epsilon > 0");
    Prior p;
    p.kind = PriorKind::Harmonic;
    p.dim = n * k;
    p.n_particles = n;
    p.space_dim = k;
    p.alpha = alpha;
    p.epsilon = epsilon;
    return p;
}

Mat harmonic_precision(std::size_t n, std::size_t k, double alpha) {
    const std::size_t d = n * k;
    Mat r(d, d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = (i == j) ? 0.5 * alpha * static_cast<double>(n)
                                      : -0.5 * alpha;
            for (std::size_t c = 0; c < k; ++c) r(i * k + c, j * k + c) = v;
        }
    return r;
}

Mat Prior::sample(Rng& rng, std::size_t count) const {
    Mat out(count, dim);
    switch (kind) {
        case PriorKind::Gaussian:
            for (std::size_t i = 0; i < count; ++i)
                for (std::size_t j = 0; j < dim; ++j) out(i, j) = mean + stdev * rng.normal();
            break;
        case PriorKind::Dirac:
            for (double& v : out.data) v = point;
            break;
        case PriorKind::Harmonic: {
            if (!chol_) {
                const Mat r = harmonic_precision(n_particles, space_dim, alpha);
                Eigen::MatrixXd a(dim, dim);
                for (std::size_t i = 0; i < dim; ++i)
                    for (std::size_t j = 0; j < dim; ++j) a(i, j) = r(i, j);
                a += epsilon * Eigen::MatrixXd::Identity(dim, dim);
                Eigen::LLT<Eigen::MatrixXd> llt(a);
                if (llt.info() != Eigen::Success)
                    throw FactorizationError("harmonic prior: R + eps I is not SPD");
                Eigen::MatrixXd l = llt.matrixL();
                auto stored = std::make_shared<Mat>(dim, dim);
                for (std::size_t i = 0; i < dim; ++i)
                    for (std::size_t j = 0; j < dim; ++j) (*stored)(i, j) = l(i, j);
                chol_ = stored;
            }
            const Mat& l = *chol_;
            Vec z(dim);
            for (std::size_t s = 0; s < count; ++s) {
                rng.normal_fill(z.data(), dim);
                double* x = out.row(s);
                // solve L^T x = z; cov(x) = (L L^T)^-1
                for (std::size_t ii = dim; ii-- > 0;) {
                    double acc = z[ii];
                    for (std::size_t jj = ii + 1; jj < dim; ++jj) acc -= l(jj, ii) * x[jj];
                    x[ii] = acc / l(ii, ii);
                }
            }
            break;
        }
    }
    return out;
}

std::string prior_kind_name(PriorKind k) {
    switch (k) {
        case PriorKind::Gaussian: return "gaussian";
        case PriorKind::Dirac: return "dirac";
        case PriorKind::Harmonic: return "harmonic";
    }
    return "?";
}

}  // namespace asbs
