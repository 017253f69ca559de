#ifndef DPR_CONJUGATE_HPP
#define DPR_CONJUGATE_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "dpr/distortion.hpp"
#include "dpr/loss_model.hpp"

namespace dpr {

/// Convex piecewise-linear function in breakpoint/value form.  The function
/// extends past the first/last breakpoint with the tail slopes, or is +inf
/// there when the corresponding side is marked bounded (domain bounds are
/// kept explicit instead of evaluating +inf arithmetic).
class PiecewiseLinearConvex {
  public:
    PiecewiseLinearConvex(std::vector<double> breakpoints, std::vector<double> values,
                          double left_slope, double right_slope,
                          bool left_bounded = false, bool right_bounded = false,
                          double convexity_tol = 0.0);

    static PiecewiseLinearConvex affine(double slope, double x0, double value_at_x0);

    std::size_t size() const { return xs_.size(); }
    const std::vector<double>& breakpoints() const { return xs_; }
    const std::vector<double>& values() const { return ys_; }
    double left_slope() const;
    double right_slope() const;
    bool left_bounded() const { return left_bounded_; }
    bool right_bounded() const { return right_bounded_; }
    /// Slope of the segment between breakpoints k and k+1.
    double segment_slope(std::size_t k) const { return slopes_[k]; }

    bool in_domain(double x) const;
    double domain_lo() const;  // -inf when unbounded
    double domain_hi() const;
    double value(double x) const;     // throws std::domain_error outside the domain
    double slope_at(double x) const;  // right-derivative convention

    /// Lower/upper end of the conjugate's domain (slope range).
    double min_slope() const;
    double max_slope() const;
    /// Conjugate value sup_x { x y - f(x) }; +infinity outside the slope range.
    double conjugate_value(double y) const;

    /// Merges collinear breakpoints (relative slope tolerance).
    PiecewiseLinearConvex simplified(double tol = 1e-12) const;

  private:
    std::vector<double> xs_, ys_, slopes_;
    double left_slope_ = 0.0, right_slope_ = 0.0;
    bool left_bounded_ = false, right_bounded_ = false;
};

/// Exact Legendre transform: slopes become breakpoints and vice versa.
PiecewiseLinearConvex legendre(const PiecewiseLinearConvex& f);

/// h(x) + h*(y) - x*y  (>= 0, zero iff y is a subgradient of h at x);
/// +infinity when x or y falls outside the respective domain.
double fenchel_young_gap(const PiecewiseLinearConvex& h, double x, double y);

/// Conjugate of g(x) = alpha + beta x + gamma f(lambda x + c) expressed
/// through the conjugate of f:
///   g*(y) = -alpha - c (y-beta)/lambda + gamma f*((y-beta)/(lambda gamma)).
std::function<double(double)> affine_conjugate(std::function<double(double)> f_star,
                                               double alpha, double beta, double gamma,
                                               double lambda, double c);

/// Exact expectation E f(L) of a piecewise-linear function under the loss
/// model (closed-form partial first moments per segment).
double expectation(const PiecewiseLinearConvex& f, const LossModel& model);

/// integral over [0,1] of h*(sigma(u)) du, evaluated by grouping the
/// monotone composition into the affine pieces of h*; exact up to the
/// distortion's own antiderivative.  Returns +infinity when the density
/// range leaves the conjugate's domain.
double conjugate_composition_integral(const PiecewiseLinearConvex& h,
                                      const Distortion& sigma);

struct HSigmaOptions {
    double truncation_eps = 1e-9;  // quantile truncation for unbounded supports
    int uniform_nodes = 2048;      // uniform probability backbone
    int level_nodes = 2048;        // density-level equidistributed nodes
    int tail_nodes_per_block = 8;  // subdivision of each dyadic tail block
};

struct HSigmaResult {
    PiecewiseLinearConvex h;
    double truncation_lo;
    double truncation_hi;
    bool truncated;
};

/// The optimal convex function of the infimum representation,
/// h(y) = integral of [ F^{-1}(a) + (y - F^{-1}(a))_+ / (1-a) ] d mu_sigma(a).
/// Exact for discrete models (breakpoints at the distinct atom values);
/// assembled on a tail-refined quantile grid otherwise, with unbounded
/// supports truncated at the option's quantile level.
HSigmaResult build_h_sigma_result(const Distortion& sigma, const LossModel& model,
                                  const HSigmaOptions& options = {});
PiecewiseLinearConvex build_h_sigma(const Distortion& sigma, const LossModel& model,
                                    const HSigmaOptions& options = {});

/// E h_sigma(L): the premium through the infimum representation.
double premium_inf(const Distortion& sigma, const LossModel& model,
                   const HSigmaOptions& options = {});

/// integral of h_sigma*(sigma(u)) over [0,1]; vanishes at the optimum.
double zero_gap(const Distortion& sigma, const LossModel& model,
                const HSigmaOptions& options = {});

struct InfRepresentation {
    double value;
    double gap;
    double truncation_lo;
    double truncation_hi;
    bool truncated;
};

/// premium_inf and zero_gap from a single h-assembly.
InfRepresentation inf_representation(const Distortion& sigma, const LossModel& model,
                                     const HSigmaOptions& options = {});

}  // namespace dpr

#endif
