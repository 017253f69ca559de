#include "dpr/premium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dpr/conjugate.hpp"
#include "dpr/quadrature.hpp"

namespace dpr {

namespace {

void check_level(double alpha, double hi) {
    if (!(alpha >= 0.0 && alpha <= hi)) {
        std::ostringstream os;
        os << "tail-expectation level must lie in [0," << hi << "], got " << alpha;
        throw std::domain_error(os.str());
    }
}

}  // namespace

double premium_direct(const Distortion& sigma, const LossModel& model) {
    if (model.is_discrete()) {
        const auto& v = model.values();
        const auto& cum = model.cumulative();
        long double acc = 0.0L;
        double prev = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double t = sigma.tau(std::min(cum[k], 1.0));
            acc += static_cast<long double>(v[k]) * (t - prev);
            prev = t;
        }
        return static_cast<double>(acc);
    }
    auto integrand = [&](double u) {
        u = std::clamp(u, 1e-15, 1.0 - 1e-16);
        return model.quantile(u) * sigma.density(u);
    };
    IntegrationOptions opt;
    opt.abs_tol = 1e-10;
    const std::vector<double> kinks = sigma.kink_points();
    const double result = integrate_adaptive_split(integrand, 0.0, 1.0, kinks, opt);
    if (!std::isfinite(result))
        throw std::runtime_error("divergent premium: the distorted tail is not integrable");
    return result;
}

double cte(double alpha, const LossModel& model) {
    check_level(alpha, 1.0);
    if (alpha == 1.0) {
        const double s = model.esssup();
        if (!std::isfinite(s))
            throw std::runtime_error(
                "unbounded result: tail expectation at level 1 of an unbounded loss");
        return s;
    }
    return model.tail_quantile_integral(alpha) / (1.0 - alpha);
}

CteVariational cte_variational(double alpha, const LossModel& model) {
    check_level(alpha, 1.0 - 1e-16);
    auto objective = [&](double q) {
        return q + model.expected_excess(q) / (1.0 - alpha);
    };
    const double center =
        alpha > 0.0 ? model.quantile(alpha)
                    : (model.bounded_below() ? model.essinf() : model.quantile(1e-12));
    double lo = center - 1.0, hi = center + 1.0;
    const double scale = 1.0 + std::fabs(center);
    // expand while the objective still decreases toward a bracket end
    for (int i = 0; i < 60; ++i) {
        const double w = hi - lo;
        if (objective(lo) < objective(lo + 0.05 * w) - 1e-14 * scale)
            lo -= w;
        else
            break;
    }
    for (int i = 0; i < 60; ++i) {
        const double w = hi - lo;
        if (objective(hi) < objective(hi - 0.05 * w) - 1e-14 * scale)
            hi += w;
        else
            break;
    }
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    for (int i = 0; i < 200 && b - a > 1e-11 * scale; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    const double q = 0.5 * (a + b);
    CteVariational result{objective(q), q, cte(alpha, model)};
    if (std::fabs(result.value - result.closed_form) > 1e-8 * (1.0 + std::fabs(result.closed_form))) {
        std::ostringstream os;
        os << "tail-expectation forms disagree: closed " << result.closed_form
           << " vs variational " << result.value;
        throw std::runtime_error(os.str());
    }
    return result;
}

double premium_kusuoka(const DistortionMeasure& mu, const LossModel& model) {
    if (mu.has_atom_at_one() && !model.bounded_above())
        throw std::runtime_error(
            "unbounded result: the measure weights level 1 but the loss has no maximum");
    long double acc = 0.0L;
    for (const auto& atom : mu.atoms()) acc += static_cast<long double>(atom.mass) * cte(atom.location, model);
    if (mu.ac_kind() != DistortionMeasure::AcKind::None) {
        // (1-a) CTE_a(L) is the tail quantile integral, so the density part
        // integrates tail(a) * g(a).
        auto integrand = [&](double a) {
            return model.tail_quantile_integral(a) * mu.ac_intensity(a);
        };
        std::vector<double> splits = mu.ac_kink_points();
        if (model.is_discrete()) {
            const auto& cum = model.cumulative();
            splits.insert(splits.end(), cum.begin(), cum.end());
            std::sort(splits.begin(), splits.end());
        }
        IntegrationOptions opt;
        opt.abs_tol = 1e-10;
        acc += integrate_adaptive_split(integrand, 0.0, 1.0, splits, opt);
    }
    return static_cast<double>(acc);
}

double premium_comonotone(const Distortion& sigma, const LossModel& model, std::size_t n) {
    if (n < 2) throw std::invalid_argument("co-monotone grid requires n >= 2");
    const UniformCoupling coupling(n);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = coupling.midpoint(i);
        acc += static_cast<long double>(model.quantile(u)) * sigma.density(u);
    }
    return static_cast<double>(acc / static_cast<long double>(n));
}

PremiumReport premium_report(const Distortion& sigma, const LossModel& model,
                             std::size_t comonotone_grid) {
    PremiumReport report;
    report.method_grid_size = comonotone_grid;
    report.direct = premium_direct(sigma, model);
    report.kusuoka = premium_kusuoka(measure_from_distortion(sigma), model);
    report.comonotone = premium_comonotone(sigma, model, comonotone_grid);
    const InfRepresentation inf = inf_representation(sigma, model);
    report.inf_rep = inf.value;
    report.zero_gap = inf.gap;
    report.truncation_lo = inf.truncation_lo;
    report.truncation_hi = inf.truncation_hi;
    report.truncated = inf.truncated;
    const double vals[] = {report.direct, report.kusuoka, report.comonotone, report.inf_rep};
    double gap = 0.0;
    for (double a : vals)
        for (double b : vals) gap = std::max(gap, std::fabs(a - b));
    report.max_pairwise_gap = gap;
    return report;
}

}  // namespace dpr
