#pragma once

#include <memory>
#include <string>

#include "asbs/common.hpp"
#include "asbs/rng.hpp"

namespace asbs {

enum class PriorKind { Gaussian, Dirac, Harmonic };

// Source distribution of the base process. The harmonic prior is the
// anisotropic Gaussian N(0, (R + eps I)^-1) of an all-pairs quadratic
// potential over n particles in k dimensions.
struct Prior {
    PriorKind kind = PriorKind::Gaussian;
    std::size_t dim = 1;
    // Gaussian
    double mean = 0.0;
    double stdev = 1.0;
    // Dirac
    double point = 0.0;
    // Harmonic
    std::size_t n_particles = 0;
    std::size_t space_dim = 0;
    double alpha = 1.0;
    double epsilon = 1e-4;

    static Prior gaussian(std::size_t dim, double mean, double stdev);
    static Prior dirac(std::size_t dim, double point = 0.0);
    static Prior harmonic(std::size_t n, std::size_t k, double alpha, double epsilon = 1e-4);

    Mat sample(Rng& rng, std::size_t count) const;

  private:
    // cached Cholesky factor of (R + eps I); built on first draw
    mutable std::shared_ptr<const Mat> chol_;
};

// Precision matrix R of the harmonic prior: (alpha/2)((n+1) I_n - 11^T) (x) I_k.
// For n=2, k=3, alpha=1 this is the unit-diagonal matrix with -1/2 entries
// coupling matching coordinates of the two particles.
Mat harmonic_precision(std::size_t n, std::size_t k, double alpha);

std::string prior_kind_name(PriorKind k);

}  // namespace asbs
