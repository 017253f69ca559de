#include "dpr/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dpr/quadrature.hpp"

namespace dpr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

PiecewiseLinearConvex::PiecewiseLinearConvex(std::vector<double> breakpoints,
                                             std::vector<double> values, double left_slope,
                                             double right_slope, bool left_bounded,
                                             bool right_bounded, double convexity_tol)
    : xs_(std::move(breakpoints)),
      ys_(std::move(values)),
      left_slope_(left_slope),
      right_slope_(right_slope),
      left_bounded_(left_bounded),
      right_bounded_(right_bounded) {
    if (xs_.empty()) fail("piecewise-linear function requires at least one breakpoint");
    if (xs_.size() != ys_.size()) fail("breakpoints and values must have equal length");
    slopes_.resize(xs_.size() > 0 ? xs_.size() - 1 : 0);
    for (std::size_t k = 0; k + 1 < xs_.size(); ++k) {
        const double dx = xs_[k + 1] - xs_[k];
        if (!(dx > 0.0)) fail("breakpoints must be strictly increasing");
        slopes_[k] = (ys_[k + 1] - ys_[k]) / dx;
    }
    auto check = [&](double lo, double hi) {
        if (hi < lo - convexity_tol * (1.0 + std::fabs(lo) + std::fabs(hi)))
            fail("convexity violated: slopes must be nondecreasing");
    };
    for (std::size_t k = 0; k + 1 < slopes_.size(); ++k) check(slopes_[k], slopes_[k + 1]);
    if (!left_bounded_ && !slopes_.empty()) check(left_slope_, slopes_.front());
    if (!right_bounded_ && !slopes_.empty()) check(slopes_.back(), right_slope_);
    if (!left_bounded_ && !right_bounded_ && slopes_.empty()) check(left_slope_, right_slope_);
}

PiecewiseLinearConvex PiecewiseLinearConvex::affine(double slope, double x0,
                                                    double value_at_x0) {
    return PiecewiseLinearConvex({x0}, {value_at_x0}, slope, slope);
}

double PiecewiseLinearConvex::left_slope() const {
    if (left_bounded_) throw std::logic_error("no left tail: domain is bounded below");
    return left_slope_;
}

double PiecewiseLinearConvex::right_slope() const {
    if (right_bounded_) throw std::logic_error("no right tail: domain is bounded above");
    return right_slope_;
}

bool PiecewiseLinearConvex::in_domain(double x) const {
    if (left_bounded_ && x < xs_.front()) return false;
    if (right_bounded_ && x > xs_.back()) return false;
    return true;
}

double PiecewiseLinearConvex::domain_lo() const { return left_bounded_ ? xs_.front() : -kInf; }
double PiecewiseLinearConvex::domain_hi() const { return right_bounded_ ? xs_.back() : kInf; }

double PiecewiseLinearConvex::value(double x) const {
    if (!in_domain(x)) {
        std::ostringstream os;
        os << "argument " << x << " outside the function domain";
        throw std::domain_error(os.str());
    }
    if (x <= xs_.front()) return ys_.front() + left_slope_ * (x - xs_.front());
    if (x >= xs_.back()) return ys_.back() + right_slope_ * (x - xs_.back());
    const std::size_t k =
        std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin() - 1;
    return ys_[k] + slopes_[k] * (x - xs_[k]);
}

double PiecewiseLinearConvex::slope_at(double x) const {
    if (!in_domain(x)) throw std::domain_error("argument outside the function domain");
    if (x < xs_.front()) return left_slope_;
    if (x >= xs_.back()) return right_bounded_ ? slopes_.empty() ? left_slope_ : slopes_.back()
                                               : right_slope_;
    const std::size_t k =
        std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin();
    return k == 0 ? (left_bounded_ ? slopes_.front() : left_slope_) : slopes_[k - 1];
}

double PiecewiseLinearConvex::min_slope() const {
    if (!left_bounded_) return left_slope_;
    return -kInf;
}

double PiecewiseLinearConvex::max_slope() const {
    if (!right_bounded_) return right_slope_;
    return kInf;
}

double PiecewiseLinearConvex::conjugate_value(double y) const {
    const double tol = 1e-12 * (1.0 + std::fabs(y));
    if (y < min_slope() - tol || y > max_slope() + tol) return kInf;
    // The supremum is attained at the breakpoint whose subdifferential
    // contains y: the first k whose outgoing slope is >= y.
    const auto it = std::lower_bound(slopes_.begin(), slopes_.end(), y);
    const std::size_t k = static_cast<std::size_t>(it - slopes_.begin());
    return y * xs_[k] - ys_[k];
}

PiecewiseLinearConvex PiecewiseLinearConvex::simplified(double tol) const {
    std::vector<double> xs{xs_.front()}, ys{ys_.front()};
    double prev_slope = left_bounded_ ? -kInf : left_slope_;
    for (std::size_t k = 0; k + 1 < xs_.size(); ++k) {
        const double s = slopes_[k];
        if (s > prev_slope + tol * (1.0 + std::fabs(s) + std::fabs(prev_slope))) {
            if (xs.back() != xs_[k]) {
                xs.push_back(xs_[k]);
                ys.push_back(ys_[k]);
            }
            prev_slope = s;
        }
    }
    const double last_out = right_bounded_ ? kInf : right_slope_;
    if (last_out > prev_slope + tol * (1.0 + std::fabs(prev_slope))) {
        if (xs.back() != xs_.back()) {
            xs.push_back(xs_.back());
            ys.push_back(ys_.back());
        }
    }
    return PiecewiseLinearConvex(std::move(xs), std::move(ys), left_slope_, right_slope_,
                                 left_bounded_, right_bounded_, 1e-9);
}

// ---------------------------------------------------------------------------

PiecewiseLinearConvex legendre(const PiecewiseLinearConvex& f) {
    const auto& xs = f.breakpoints();
    const auto& ys = f.values();
    const std::size_t m = xs.size();

    std::vector<double> cx, cy;
    auto push = [&](double slope, double x, double y) {
        const double v = slope * x - y;
        if (!cx.empty() && slope <= cx.back() + 1e-14 * (1.0 + std::fabs(slope))) return;
        cx.push_back(slope);
        cy.push_back(v);
    };

    const bool conj_left_bounded = !f.left_bounded();
    const bool conj_right_bounded = !f.right_bounded();
    if (!f.left_bounded()) push(f.left_slope(), xs.front(), ys.front());
    for (std::size_t k = 0; k + 1 < m; ++k) push(f.segment_slope(k), xs[k], ys[k]);
    if (!f.right_bounded()) push(f.right_slope(), xs.back(), ys.back());

    if (cx.empty()) {
        // f is +inf outside a single point x0: conjugate is the affine y*x0 - f(x0).
        return PiecewiseLinearConvex::affine(xs.front(), 0.0, -ys.front());
    }
    const double conj_left_slope = xs.front();   // used when f is bounded below
    const double conj_right_slope = xs.back();   // used when f is bounded above
    return PiecewiseLinearConvex(std::move(cx), std::move(cy), conj_left_slope,
                                 conj_right_slope, conj_left_bounded, conj_right_bounded,
                                 1e-9);
}

double fenchel_young_gap(const PiecewiseLinearConvex& h, double x, double y) {
    if (!h.in_domain(x)) return kInf;
    const double conj = h.conjugate_value(y);
    if (!std::isfinite(conj)) return kInf;
    return h.value(x) + conj - x * y;
}

std::function<double(double)> affine_conjugate(std::function<double(double)> f_star,
                                               double alpha, double beta, double gamma,
                                               double lambda, double c) {
    if (!(gamma > 0.0)) fail("affine conjugate transform requires gamma > 0");
    if (lambda == 0.0) fail("affine conjugate transform requires lambda != 0");
    return [f = std::move(f_star), alpha, beta, gamma, lambda, c](double y) {
        const double t = (y - beta) / lambda;
        return -alpha - c * t + gamma * f(t / gamma);
    };
}

// ---------------------------------------------------------------------------

double expectation(const PiecewiseLinearConvex& f, const LossModel& model) {
    if (!f.in_domain(model.essinf()) || !f.in_domain(model.esssup()))
        throw std::domain_error("loss support leaves the function domain");
    const auto& xs = f.breakpoints();
    const auto& ys = f.values();
    long double acc = 0.0L;
    // left tail and every segment as a + s*x over (x_k, x_{k+1}]
    double prev = -kInf;
    for (std::size_t k = 0; k <= xs.size(); ++k) {
        double hi, slope, anchor_x, anchor_y;
        if (k < xs.size()) {
            hi = xs[k];
            slope = k == 0 ? (f.left_bounded() ? 0.0 : f.left_slope())
                           : f.segment_slope(k - 1);
            anchor_x = xs[k];
            anchor_y = ys[k];
        } else {
            hi = kInf;
            slope = f.right_bounded() ? 0.0 : f.right_slope();
            anchor_x = xs.back();
            anchor_y = ys.back();
        }
        const double p = model.probability_between(prev, hi);
        if (p > 0.0) {
            const double intercept = anchor_y - slope * anchor_x;
            acc += static_cast<long double>(intercept) * p +
                   static_cast<long double>(slope) * model.partial_first_moment(prev, hi);
        }
        prev = hi;
    }
    return static_cast<double>(acc);
}

double conjugate_composition_integral(const PiecewiseLinearConvex& h,
                                      const Distortion& sigma) {
    const double smin = sigma.min_density();
    const double smax = sigma.max_density();
    const double tol = 1e-9 * (1.0 + std::fabs(smax));
    if (smin < h.min_slope() - tol || smax > h.max_slope() + tol) return kInf;

    const auto& xs = h.breakpoints();
    const auto& ys = h.values();
    // Region boundaries in u: where the density crosses each interior slope.
    std::vector<double> bounds(xs.size() + 1);
    bounds[0] = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        bounds[k + 1] = std::clamp(sigma.density_inverse(h.segment_slope(k)), bounds[k], 1.0);
    }
    bounds[xs.size()] = 1.0;
    for (std::size_t k = 1; k < bounds.size(); ++k)
        bounds[k] = std::max(bounds[k], bounds[k - 1]);

    long double acc = 0.0L;
    for (std::size_t p = 0; p < xs.size(); ++p) {
        const double a = bounds[p], b = bounds[p + 1];
        if (!(b > a)) continue;
        // On this region h*(sigma(u)) = x_p * sigma(u) - h(x_p).
        acc += static_cast<long double>(xs[p]) * (sigma.tau(b) - sigma.tau(a));
        acc -= static_cast<long double>(ys[p]) * (b - a);
    }
    return static_cast<double>(acc);
}

// ---------------------------------------------------------------------------

namespace {

struct TruncatedQuantile {
    const LossModel& model;
    double eps_lo, eps_hi;
    double lo, hi;

    TruncatedQuantile(const LossModel& m, double eps) : model(m) {
        eps_lo = m.bounded_below() ? 0.0 : eps;
        eps_hi = m.bounded_above() ? 0.0 : eps;
        lo = m.bounded_below() ? m.essinf() : m.quantile(eps_lo);
        hi = m.bounded_above() ? m.esssup() : m.quantile(1.0 - eps_hi);
    }
    double operator()(double u) const {
        if (u <= eps_lo) return lo;
        if (u >= 1.0 - eps_hi) return hi;
        return std::clamp(model.quantile(u), lo, hi);
    }
    bool truncated() const { return eps_lo > 0.0 || eps_hi > 0.0; }
};

// Probability grid for the h assembly: uniform backbone, density-level
// equidistribution (resolves steep table densities), dyadic refinement into
// both tails down to the truncation level, plus the density's own kinks.
std::vector<double> assembly_grid(const Distortion& sigma, const HSigmaOptions& opt) {
    std::vector<double> u;
    const double delta0 = 1.0 / 64.0;
    const int n = std::max(2, opt.uniform_nodes);
    u.reserve(static_cast<std::size_t>(n + opt.level_nodes) + 256);
    for (int i = 0; i <= n; ++i)
        u.push_back(delta0 + (1.0 - 2.0 * delta0) * static_cast<double>(i) / n);
    const double eps = std::max(opt.truncation_eps, 1e-15);
    const int per_block = std::max(1, opt.tail_nodes_per_block);
    for (double delta = delta0; delta > eps;) {
        const double next = std::max(0.5 * delta, eps);
        for (int j = 0; j < per_block; ++j) {
            const double t = delta + (next - delta) * static_cast<double>(j + 1) / per_block;
            u.push_back(1.0 - t);
            u.push_back(t);
        }
        delta = next;
    }
    u.push_back(0.0);
    u.push_back(1.0);
    for (double k : sigma.kink_points()) u.push_back(k);
    const double s0 = sigma.min_density(), s1 = sigma.max_density();
    if (s1 > s0) {
        const int levels = std::max(2, opt.level_nodes);
        for (int j = 1; j < levels; ++j) {
            const double s = s0 + (s1 - s0) * static_cast<double>(j) / levels;
            u.push_back(sigma.density_inverse(s));
        }
    }
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end(),
                        [](double a, double b) { return b - a <= 1e-14; }),
            u.end());
    if (u.front() > 0.0) u.insert(u.begin(), 0.0);
    if (u.back() < 1.0) u.push_back(1.0);
    return u;
}

HSigmaResult build_discrete(const Distortion& sigma, const LossModel& model) {
    const DistortionMeasure mu = measure_from_distortion(sigma);
    const auto& v = model.values();
    const auto& cum = model.cumulative();
    const std::size_t n = v.size();

    double m0 = 0.0;
    struct JumpAtom {
        double location, mass;
    };
    std::vector<JumpAtom> jumps;
    for (const auto& a : mu.atoms()) {
        if (a.location <= 1e-12)
            m0 += a.mass;
        else
            jumps.push_back({a.location, a.mass});
    }

    std::vector<double> region_mass(n, 0.0), region_increment(n, 0.0);
    double prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double hi = std::min(cum[k], 1.0);
        region_mass[k] = mu.ac_mass(prev, hi);
        region_increment[k] = mu.ac_increment(prev, hi);
        for (const auto& j : jumps)
            if (j.location > prev && j.location <= hi) {
                region_mass[k] += j.mass;
                region_increment[k] += j.mass / (1.0 - j.location);
            }
        prev = hi;
    }

    long double intercept = 0.0L;
    for (std::size_t k = 0; k < n; ++k)
        intercept += static_cast<long double>(v[k]) * region_mass[k];

    std::vector<double> hs(n);
    hs[0] = static_cast<double>(intercept + static_cast<long double>(m0) * v[0]);
    long double slope = m0;
    std::vector<double> xs(v.begin(), v.end());
    for (std::size_t k = 0; k + 1 < n; ++k) {
        slope += region_increment[k];
        hs[k + 1] = hs[k] + static_cast<double>(slope) * (v[k + 1] - v[k]);
    }
    const double right = static_cast<double>(slope + (n > 0 ? region_increment[n - 1] : 0.0));
    PiecewiseLinearConvex h(std::move(xs), std::move(hs), m0, right, false, false, 1e-9);
    return {h.simplified(), model.essinf(), model.esssup(), false};
}

HSigmaResult build_continuous(const Distortion& sigma, const LossModel& model,
                              const HSigmaOptions& opt) {
    const DistortionMeasure mu = measure_from_distortion(sigma);
    const TruncatedQuantile quantile(model, opt.truncation_eps);
    const std::vector<double> grid = assembly_grid(sigma, opt);
    const GaussLegendreRule& rule = gauss_legendre(16);

    double m0 = 0.0;
    std::vector<DistortionMeasure::Atom> jumps;
    for (const auto& a : mu.atoms()) {
        if (a.location <= 1e-12)
            m0 += a.mass;
        else
            jumps.push_back(a);
    }

    // intercept A = integral over (0,1] of (1-a) F~^{-1}(a) d sigma(a)
    long double intercept = 0.0L;
    if (mu.ac_kind() != DistortionMeasure::AcKind::None) {
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const double a = grid[i], b = grid[i + 1];
            if (!(b > a)) continue;
            intercept += rule.integrate(
                [&](double p) { return (1.0 - p) * quantile(p) * mu.ac_intensity(p); }, a, b);
        }
    }
    for (const auto& j : jumps) intercept += static_cast<long double>(j.mass) * quantile(j.location);

    // breakpoints with chordal slopes from the exact derivative sigma(F(t))
    std::vector<double> xs, hs;
    xs.reserve(grid.size());
    hs.reserve(grid.size());
    const double y0 = quantile(grid.front());
    xs.push_back(y0);
    hs.push_back(static_cast<double>(intercept + static_cast<long double>(m0) * y0));
    double prev_slope = m0;
    const double slope_cap = sigma.max_density();
    long double h_acc = hs[0];
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double y_hi = quantile(grid[i + 1]);
        const double y_lo = xs.back();
        const double dy = y_hi - y_lo;
        if (!(dy > 1e-13 * (1.0 + std::fabs(y_hi)))) continue;
        double s = rule.integrate([&](double t) { return sigma.density(model.cdf(t)); },
                                  y_lo, y_hi) /
                   dy;
        s = std::clamp(s, prev_slope, slope_cap);
        h_acc += static_cast<long double>(s) * dy;
        xs.push_back(y_hi);
        hs.push_back(static_cast<double>(h_acc));
        prev_slope = s;
    }

    PiecewiseLinearConvex h(std::move(xs), std::move(hs), m0, sigma.max_density(), false,
                            false, 1e-9);
    return {h.simplified(1e-11), quantile.lo, quantile.hi, quantile.truncated()};
}

}  // namespace

HSigmaResult build_h_sigma_result(const Distortion& sigma, const LossModel& model,
                                  const HSigmaOptions& options) {
    if (model.is_discrete()) return build_discrete(sigma, model);
    return build_continuous(sigma, model, options);
}

PiecewiseLinearConvex build_h_sigma(const Distortion& sigma, const LossModel& model,
                                    const HSigmaOptions& options) {
    return build_h_sigma_result(sigma, model, options).h;
}

double premium_inf(const Distortion& sigma, const LossModel& model,
                   const HSigmaOptions& options) {
    return expectation(build_h_sigma(sigma, model, options), model);
}

double zero_gap(const Distortion& sigma, const LossModel& model,
                const HSigmaOptions& options) {
    return conjugate_composition_integral(build_h_sigma(sigma, model, options), sigma);
}

InfRepresentation inf_representation(const Distortion& sigma, const LossModel& model,
                                     const HSigmaOptions& options) {
    const HSigmaResult built = build_h_sigma_result(sigma, model, options);
    return {expectation(built.h, model), conjugate_composition_integral(built.h, sigma),
            built.truncation_lo, built.truncation_hi, built.truncated};
}

}  // namespace dpr
