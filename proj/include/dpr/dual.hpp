#ifndef DPR_DUAL_HPP
#define DPR_DUAL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dpr/distortion.hpp"
#include "dpr/loss_model.hpp"

namespace dpr {

/// Dual variable on a finite probability space: z-values with their
/// probabilities (shared with a discrete loss model's atoms).
struct DualVariable {
    std::vector<double> z;
    std::vector<double> p;

    DualVariable(std::vector<double> z_values, std::vector<double> probabilities);
    /// The distribution of Z, for tail-integral evaluation.
    LossModel distribution() const;
    double expectation() const;
    double min_value() const;
};

/// S(a) = integral of sigma over [a, 1] = 1 - tau(a); decreasing and concave
/// with S(0) = 1, S(1) = 0.
class TailEnvelope {
  public:
    explicit TailEnvelope(Distortion sigma);
    double operator()(double a) const;
    const Distortion& distortion() const { return sigma_; }

  private:
    Distortion sigma_;
};

struct FeasibilityResult {
    bool feasible = false;
    double mean_defect = 0.0;                  // E Z - 1
    std::optional<double> violating_alpha;     // first constraint failure
    std::vector<double> binding_alphas;        // constraints met with equality
    explicit operator bool() const { return feasible; }
};

/// Majorization check Z <= sigma: E Z = 1 and (1-a) CTE_a(Z) <= S(a) at the
/// cumulative probabilities of Z's atoms (exact there because the tail
/// integral is piecewise linear and S is concave), plus Chebyshev-spaced
/// levels for smooth densities.
FeasibilityResult is_feasible(const DualVariable& Z, const Distortion& sigma,
                              double tol = 1e-9);

/// Every feasible Z is nonnegative; returns the implication for this Z.
bool nonnegativity_check(const DualVariable& Z, const Distortion& sigma);

struct SupOracleResult {
    double candidate_value = 0.0;  // E[L Z*] for the co-monotone candidate
    double best_value = 0.0;       // best E[L Z] over the perturbation walk
    std::size_t trials = 0;
    std::vector<double> binding_alphas;
};

/// Brute-force confirmation of the supremum representation: starts from the
/// co-monotone candidate Z*_i = (tau(P_i) - tau(P_{i-1})) / p_i, then walks
/// through `trials` random feasible mass-preserving transfers, tracking the
/// best E[L Z] seen.
SupOracleResult sup_oracle(const Distortion& sigma, const LossModel& model,
                           std::size_t trials, std::uint64_t seed);

/// The two dual forms of the tail expectation: the capped-variable closed
/// form (greedy fill of mass 1-alpha from the largest atoms) and the same
/// optimizer validated against the recursive CTE constraint set.
std::pair<double, double> cte_dual_forms(double alpha, const LossModel& model);

}  // namespace dpr

#endif
