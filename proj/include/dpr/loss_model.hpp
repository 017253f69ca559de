#ifndef DPR_LOSS_MODEL_HPP
#define DPR_LOSS_MODEL_HPP

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "dpr/distortion.hpp"

namespace dpr {

double standard_normal_cdf(double z);
double standard_normal_density(double z);
/// Quantile of the standard normal, accurate to ~1e-15 (safeguarded Newton).
double standard_normal_quantile(double u);

/// A loss distribution exposed through cdf, generalized-inverse quantile,
/// mean, essential bounds and sampling.  Discrete and empirical models share
/// the sorted-atom machinery; parametric families carry closed forms for the
/// tail quantile integral and partial first moments.
class LossModel {
  public:
    enum class Kind { Discrete, Empirical, Normal, Lognormal, Exponential, Uniform };

    static LossModel discrete(std::vector<std::pair<double, double>> atoms);
    static LossModel empirical(std::vector<double> samples);
    static LossModel normal(double mu, double sd);
    static LossModel lognormal(double log_mu, double log_sd);
    static LossModel exponential(double rate);
    static LossModel uniform(double lo, double hi);

    Kind kind() const { return kind_; }
    bool is_discrete() const { return kind_ == Kind::Discrete || kind_ == Kind::Empirical; }
    bool has_density() const { return !is_discrete(); }

    double cdf(double x) const;
    /// inf{x : cdf(x) >= u} for u in (0, 1]; throws on u = 1 when the
    /// support is unbounded above.
    double quantile(double u) const;
    double density(double x) const;

    double mean() const;
    double second_moment() const;
    double essinf() const;  // -infinity when unbounded below
    double esssup() const;  // +infinity when unbounded above
    bool bounded_above() const;
    bool bounded_below() const;

    /// integral_a^1 quantile(p) dp, exact (closed form per family).
    double tail_quantile_integral(double a) const;
    /// integral of x over (x1, x2] against the distribution, exact.
    double partial_first_moment(double x1, double x2) const;
    /// P(x1 < L <= x2).
    double probability_between(double x1, double x2) const;
    /// E (L - q)_+, exact.
    double expected_excess(double q) const;

    double sample(std::mt19937_64& rng) const;

    // Sorted-atom access (Discrete / Empirical only).
    const std::vector<double>& values() const;
    const std::vector<double>& probabilities() const;
    const std::vector<double>& cumulative() const;

  private:
    LossModel() = default;
    void build_discrete(std::vector<double> values, std::vector<double> probs);

    Kind kind_ = Kind::Discrete;
    std::vector<double> values_;
    std::vector<double> probs_;
    std::vector<double> cum_;
    std::vector<double> suffix_moment_;  // suffix sums of v*p
    double a_ = 0.0, b_ = 1.0;           // parametric parameters
};

/// Probability midpoints (2i-1)/2n of the uniform variable coupled
/// co-monotonically with the loss.
class UniformCoupling {
  public:
    explicit UniformCoupling(std::size_t n);
    std::size_t size() const { return n_; }
    double midpoint(std::size_t i) const;  // i in [0, n)
    std::vector<double> midpoints() const;

  private:
    std::size_t n_;
};

/// F_{L_sigma}(y) = tau_sigma(F_L(y)).
double distorted_cdf(const Distortion& sigma, const LossModel& model, double y);
/// Quantile of the distorted loss: F_L^{-1}(tau_sigma^{-1}(u)).
double distorted_quantile(const Distortion& sigma, const LossModel& model, double u);
/// f_{L_sigma}(y) = f_L(y) * sigma(F_L(y)); parametric models only.
double distorted_density(const Distortion& sigma, const LossModel& model, double y);

}  // namespace dpr

#endif
