#ifndef DPR_QUADRATURE_HPP
#define DPR_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace dpr {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        long double sum = 0.0L;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += static_cast<long double>(weights[i]) * f(mid + half * nodes[i]);
        return static_cast<double>(sum * half);
    }
};

/// Returns the n-point rule; computed once per n and cached.
const GaussLegendreRule& gauss_legendre(int n);

struct IntegrationOptions {
    double abs_tol = 1e-9;   // per-panel acceptance threshold
    double rel_tol = 1e-12;
    int max_depth = 52;
    int rule_order = 15;
};

namespace detail {

template <typename F>
double integrate_panel(F& f, const GaussLegendreRule& rule, double a, double b,
                       double whole, const IntegrationOptions& opt, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = rule.integrate(f, a, mid);
    const double right = rule.integrate(f, mid, b);
    const double halves = left + right;
    const double err = std::fabs(whole - halves);
    if (depth >= opt.max_depth ||
        err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(halves)))
        return halves;
    return integrate_panel(f, rule, a, mid, left, opt, depth + 1) +
           integrate_panel(f, rule, mid, b, right, opt, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Legendre on [a, b]; bisects until the two-half estimate
/// agrees with the parent panel within tolerance.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, IntegrationOptions opt = {}) {
    if (!(a < b)) return 0.0;
    const GaussLegendreRule& rule = gauss_legendre(opt.rule_order);
    const double whole = rule.integrate(f, a, b);
    return detail::integrate_panel(f, rule, a, b, whole, opt, 0);
}

/// Adaptive integration with the panel structure pre-split at known kinks.
template <typename F>
double integrate_adaptive_split(F&& f, double a, double b,
                                std::span<const double> split_points,
                                IntegrationOptions opt = {}) {
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double s : split_points)
        if (s > a && s < b) cuts.push_back(s);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    long double total = 0.0L;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i])
            total += integrate_adaptive(f, cuts[i], cuts[i + 1], opt);
    return static_cast<double>(total);
}

}  // namespace dpr

#endif
