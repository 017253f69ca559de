#ifndef DPR_PREMIUM_HPP
#define DPR_PREMIUM_HPP

#include <cstddef>

#include "dpr/distortion.hpp"
#include "dpr/loss_model.hpp"

namespace dpr {

/// Distorted premium integral of F^{-1}(u) sigma(u) over [0,1].  Exact atom
/// summation for discrete models, adaptive quadrature split at the density's
/// kinks otherwise.
double premium_direct(const Distortion& sigma, const LossModel& model);

/// Conditional tail expectation at a level in [0,1]; level 1 is the
/// essential supremum (throws on unbounded supports).
double cte(double alpha, const LossModel& model);

struct CteVariational {
    double value;      // inf_q q + E(L-q)_+ / (1-alpha)
    double minimizer;  // the attaining q
    double closed_form;
};

/// The variational form of the tail expectation, minimized over q by
/// golden-section search; throws when it disagrees with the closed form by
/// more than 1e-8.
CteVariational cte_variational(double alpha, const LossModel& model);

/// Kusuoka mixture integral of CTE_a(L) against the measure.
double premium_kusuoka(const DistortionMeasure& mu, const LossModel& model);

/// Midpoint-grid rendering of E[L sigma(U)] under the co-monotone coupling.
double premium_comonotone(const Distortion& sigma, const LossModel& model, std::size_t n);

struct PremiumReport {
    double direct = 0.0;
    double kusuoka = 0.0;
    double comonotone = 0.0;
    double inf_rep = 0.0;
    double zero_gap = 0.0;
    double max_pairwise_gap = 0.0;
    std::size_t method_grid_size = 0;
    double truncation_lo = 0.0;
    double truncation_hi = 0.0;
    bool truncated = false;
};

/// All four premium routes plus the conjugate residual.
PremiumReport premium_report(const Distortion& sigma, const LossModel& model,
                             std::size_t comonotone_grid = 100000);

}  // namespace dpr

#endif
