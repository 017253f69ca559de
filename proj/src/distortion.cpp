#include "dpr/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dpr {

namespace {

constexpr double kMonotoneTol = 1e-12;
constexpr double kMassTol = 1e-9;

double poly_eval(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
    return d;
}

// Antiderivative with zero constant term.
std::vector<double> poly_antiderivative(const std::vector<double>& c) {
    std::vector<double> a(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) a[k + 1] = c[k] / static_cast<double>(k + 1);
    return a;
}

double poly_definite_integral(const std::vector<double>& c, double a, double b) {
    const std::vector<double> anti = poly_antiderivative(c);
    return poly_eval(anti, b) - poly_eval(anti, a);
}

std::vector<double> poly_multiply(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void check_unit_interval(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << name << " must lie in [0,1], got " << p;
        throw std::domain_error(os.str());
    }
}

// Leftmost root of a monotone predicate on [0,1] by bisection.
template <typename Pred>
double bisect_leftmost(Pred&& holds) {
    double lo = 0.0, hi = 1.0;
    if (holds(0.0)) return 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (holds(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

Distortion Distortion::cte(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        std::ostringstream os;
        os << "invalid level: tail-expectation distortion requires 0 <= alpha < 1, got "
           << alpha << " (level 1 is the essential-supremum case)";
        fail(os.str());
    }
    Distortion d;
    d.kind_ = Kind::Cte;
    d.alpha_ = alpha;
    return d;
}

Distortion Distortion::polynomial(std::vector<double> coefficients) {
    if (coefficients.empty()) fail("polynomial distortion requires at least one coefficient");
    double integral = 0.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k)
        integral += coefficients[k] / static_cast<double>(k + 1);
    if (std::fabs(integral - 1.0) > kMassTol) {
        std::ostringstream os;
        os << "distortion density must integrate to 1, got " << integral;
        fail(os.str());
    }
    const std::vector<double> deriv = poly_derivative(coefficients);
    const int n_check = 2048;
    for (int i = 0; i <= n_check; ++i) {
        const double u = static_cast<double>(i) / n_check;
        if (poly_eval(coefficients, u) < -kMonotoneTol) {
            std::ostringstream os;
            os << "distortion density must be nonnegative, violated at u = " << u;
            fail(os.str());
        }
        if (poly_eval(deriv, u) < -1e-9) {
            std::ostringstream os;
            os << "distortion density must be nondecreasing, violated at u = " << u;
            fail(os.str());
        }
    }
    Distortion d;
    d.kind_ = Kind::Polynomial;
    d.coeffs_ = std::move(coefficients);
    return d;
}

Distortion Distortion::table(std::vector<double> values) {
    if (values.size() < 2) fail("table distortion requires at least two grid values");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < -kMonotoneTol) {
            std::ostringstream os;
            os << "distortion density must be nonnegative, violated at node " << i;
            fail(os.str());
        }
        if (i > 0 && values[i] < values[i - 1] - kMonotoneTol) {
            std::ostringstream os;
            os << "distortion density must be nondecreasing, violated at node " << i;
            fail(os.str());
        }
        if (!std::isfinite(values[i]))
            fail("distortion density values must be finite (unbounded densities are rejected)");
    }
    const double step = 1.0 / static_cast<double>(values.size() - 1);
    long double acc = 0.0L;
    std::vector<double> cum(values.size());
    cum[0] = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        acc += 0.5L * (static_cast<long double>(values[i - 1]) + values[i]) * step;
        cum[i] = static_cast<double>(acc);
    }
    if (std::fabs(cum.back() - 1.0) > kMassTol) {
        std::ostringstream os;
        os << "distortion density must integrate to 1, got " << cum.back();
        fail(os.str());
    }
    Distortion d;
    d.kind_ = Kind::Table;
    d.values_ = std::move(values);
    d.cum_ = std::move(cum);
    return d;
}

double Distortion::density(double u) const {
    check_unit_interval(u, "density argument");
    switch (kind_) {
        case Kind::Cte:
            if (alpha_ == 0.0) return 1.0;
            return u > alpha_ ? 1.0 / (1.0 - alpha_) : 0.0;
        case Kind::Polynomial:
            return std::max(0.0, poly_eval(coeffs_, u));
        case Kind::Table: {
            const double n = static_cast<double>(values_.size() - 1);
            const double t = u * n;
            const std::size_t k = std::min(values_.size() - 2, static_cast<std::size_t>(t));
            const double frac = t - static_cast<double>(k);
            return values_[k] + (values_[k + 1] - values_[k]) * frac;
        }
    }
    return 0.0;
}

double Distortion::density_right(double u) const {
    if (kind_ == Kind::Cte) {
        check_unit_interval(u, "density argument");
        return u >= alpha_ ? 1.0 / (1.0 - alpha_) : 0.0;
    }
    return density(u);
}

double Distortion::increment(double a, double b) const {
    if (b < a) return 0.0;
    return density_right(b) - density_right(a);
}

double Distortion::density_inverse(double s) const {
    if (s <= min_density()) return 0.0;
    if (s > max_density()) return 1.0;
    switch (kind_) {
        case Kind::Cte:
            return alpha_;
        case Kind::Polynomial:
            return bisect_leftmost([&](double u) { return poly_eval(coeffs_, u) >= s; });
        case Kind::Table: {
            const auto it = std::lower_bound(values_.begin(), values_.end(), s);
            const std::size_t k = static_cast<std::size_t>(it - values_.begin());
            const double step = 1.0 / static_cast<double>(values_.size() - 1);
            if (k == 0) return 0.0;
            const double lo = values_[k - 1], hi = values_[k];
            const double frac = hi > lo ? (s - lo) / (hi - lo) : 0.0;
            return (static_cast<double>(k - 1) + frac) * step;
        }
    }
    return 1.0;
}

double Distortion::tau(double p) const {
    check_unit_interval(p, "tau argument");
    switch (kind_) {
        case Kind::Cte:
            return p <= alpha_ ? 0.0 : (p - alpha_) / (1.0 - alpha_);
        case Kind::Polynomial: {
            long double r = 0.0L;
            for (std::size_t k = coeffs_.size(); k-- > 0;)
                r = r * p + static_cast<long double>(coeffs_[k]) / (k + 1);
            return static_cast<double>(r * p);
        }
        case Kind::Table: {
            const double n = static_cast<double>(values_.size() - 1);
            const double step = 1.0 / n;
            const double t = p * n;
            const std::size_t k = std::min(values_.size() - 2, static_cast<std::size_t>(t));
            const double dt = p - static_cast<double>(k) * step;
            const double slope = (values_[k + 1] - values_[k]) / step;
            return cum_[k] + values_[k] * dt + 0.5 * slope * dt * dt;
        }
    }
    return 0.0;
}

double Distortion::tau_inverse(double u) const {
    check_unit_interval(u, "tau_inverse argument");
    if (u <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::Cte:
            return std::min(1.0, alpha_ + (1.0 - alpha_) * u);
        case Kind::Polynomial:
            if (u >= 1.0) return 1.0;
            return bisect_leftmost([&](double p) { return tau(p) >= u; });
        case Kind::Table: {
            if (u >= cum_.back()) return 1.0;
            const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
            std::size_t k = static_cast<std::size_t>(it - cum_.begin());
            if (k == 0) return 0.0;
            --k;
            const double step = 1.0 / static_cast<double>(values_.size() - 1);
            const double c = u - cum_[k];
            if (c <= 0.0) return static_cast<double>(k) * step;
            const double b = values_[k];
            const double m = (values_[k + 1] - values_[k]) / step;
            double dt;
            if (m <= 0.0) {
                dt = b > 0.0 ? c / b : step;
            } else if (b <= 0.0) {
                dt = std::sqrt(2.0 * c / m);
            } else {
                dt = 2.0 * c / (b + std::sqrt(b * b + 2.0 * m * c));
            }
            return std::min(1.0, static_cast<double>(k) * step + std::min(dt, step));
        }
    }
    return 1.0;
}

double Distortion::squared_norm() const {
    switch (kind_) {
        case Kind::Cte:
            return 1.0 / (1.0 - alpha_);
        case Kind::Polynomial:
            return poly_definite_integral(poly_multiply(coeffs_, coeffs_), 0.0, 1.0);
        case Kind::Table: {
            const double step = 1.0 / static_cast<double>(values_.size() - 1);
            long double acc = 0.0L;
            for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
                const double a = values_[i], b = values_[i + 1];
                acc += step / 3.0L * (a * a + a * b + b * b);
            }
            return static_cast<double>(acc);
        }
    }
    return 1.0;
}

std::vector<double> Distortion::kink_points() const {
    switch (kind_) {
        case Kind::Cte:
            return alpha_ > 0.0 ? std::vector<double>{alpha_} : std::vector<double>{};
        case Kind::Polynomial:
            return {};
        case Kind::Table: {
            std::vector<double> pts;
            const double step = 1.0 / static_cast<double>(values_.size() - 1);
            for (std::size_t i = 1; i + 1 < values_.size(); ++i)
                pts.push_back(static_cast<double>(i) * step);
            return pts;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------

void DistortionMeasure::validate() const {
    for (const Atom& a : atoms_) {
        if (!(a.location >= 0.0 && a.location <= 1.0))
            fail("measure atom location must lie in [0,1]");
        if (!(a.mass > 0.0)) fail("measure atom mass must be positive");
    }
    if (ac_kind_ == AcKind::Grid) {
        for (double g : g_segments_)
            if (g < -kMonotoneTol) fail("measure intensity must be nonnegative");
    }
    const double mass = total_mass();
    if (std::fabs(mass - 1.0) > kMassTol) {
        std::ostringstream os;
        os << "measure total mass must be 1, got " << mass;
        fail(os.str());
    }
}

DistortionMeasure DistortionMeasure::atoms_only(std::vector<Atom> atoms) {
    DistortionMeasure m;
    m.atoms_ = std::move(atoms);
    m.ac_kind_ = AcKind::None;
    m.validate();
    return m;
}

DistortionMeasure DistortionMeasure::with_polynomial_intensity(std::vector<Atom> atoms,
                                                               std::vector<double> g_coeffs) {
    DistortionMeasure m;
    m.atoms_ = std::move(atoms);
    m.ac_kind_ = AcKind::Polynomial;
    m.g_coeffs_ = std::move(g_coeffs);
    m.validate();
    return m;
}

DistortionMeasure DistortionMeasure::with_grid_intensity(std::vector<Atom> atoms,
                                                         std::vector<double> g_segments) {
    if (g_segments.empty()) fail("grid intensity requires at least one segment");
    DistortionMeasure m;
    m.atoms_ = std::move(atoms);
    m.ac_kind_ = AcKind::Grid;
    m.g_segments_ = std::move(g_segments);
    m.validate();
    return m;
}

double DistortionMeasure::ac_intensity(double a) const {
    switch (ac_kind_) {
        case AcKind::None:
            return 0.0;
        case AcKind::Polynomial:
            return poly_eval(g_coeffs_, a);
        case AcKind::Grid: {
            const double n = static_cast<double>(g_segments_.size());
            const std::size_t k =
                std::min(g_segments_.size() - 1, static_cast<std::size_t>(a * n));
            return g_segments_[k];
        }
    }
    return 0.0;
}

double DistortionMeasure::ac_density(double a) const { return (1.0 - a) * ac_intensity(a); }

double DistortionMeasure::ac_increment(double a, double b) const {
    if (b <= a) return 0.0;
    switch (ac_kind_) {
        case AcKind::None:
            return 0.0;
        case AcKind::Polynomial:
            return poly_definite_integral(g_coeffs_, a, b);
        case AcKind::Grid: {
            const double n = static_cast<double>(g_segments_.size());
            long double acc = 0.0L;
            for (std::size_t k = 0; k < g_segments_.size(); ++k) {
                const double lo = std::max(a, static_cast<double>(k) / n);
                const double hi = std::min(b, static_cast<double>(k + 1) / n);
                if (hi > lo) acc += static_cast<long double>(g_segments_[k]) * (hi - lo);
            }
            return static_cast<double>(acc);
        }
    }
    return 0.0;
}

double DistortionMeasure::ac_mass(double a, double b) const {
    if (b <= a) return 0.0;
    switch (ac_kind_) {
        case AcKind::None:
            return 0.0;
        case AcKind::Polynomial: {
            // integral of (1-x) g(x)
            std::vector<double> weighted = g_coeffs_;
            weighted.insert(weighted.begin(), 0.0);
            for (std::size_t k = 0; k < g_coeffs_.size(); ++k) weighted[k + 1] = -g_coeffs_[k];
            for (std::size_t k = 0; k < g_coeffs_.size(); ++k) weighted[k] += g_coeffs_[k];
            return poly_definite_integral(weighted, a, b);
        }
        case AcKind::Grid: {
            const double n = static_cast<double>(g_segments_.size());
            long double acc = 0.0L;
            for (std::size_t k = 0; k < g_segments_.size(); ++k) {
                const double lo = std::max(a, static_cast<double>(k) / n);
                const double hi = std::min(b, static_cast<double>(k + 1) / n);
                if (hi > lo) {
                    const double mid = 0.5 * (lo + hi);
                    acc += static_cast<long double>(g_segments_[k]) * (hi - lo) * (1.0 - mid);
                }
            }
            return static_cast<double>(acc);
        }
    }
    return 0.0;
}

double DistortionMeasure::total_mass() const {
    long double acc = 0.0L;
    for (const Atom& a : atoms_) acc += a.mass;
    acc += ac_mass(0.0, 1.0);
    return static_cast<double>(acc);
}

bool DistortionMeasure::has_atom_at_one(double tol) const {
    for (const Atom& a : atoms_)
        if (a.location >= 1.0 - tol) return true;
    return false;
}

std::vector<double> DistortionMeasure::ac_kink_points() const {
    std::vector<double> pts;
    if (ac_kind_ == AcKind::Grid) {
        const double n = static_cast<double>(g_segments_.size());
        for (std::size_t k = 1; k < g_segments_.size(); ++k)
            pts.push_back(static_cast<double>(k) / n);
    }
    for (const Atom& a : atoms_)
        if (a.location > 0.0 && a.location < 1.0) pts.push_back(a.location);
    std::sort(pts.begin(), pts.end());
    return pts;
}

// ---------------------------------------------------------------------------

DistortionMeasure measure_from_distortion(const Distortion& sigma) {
    switch (sigma.kind()) {
        case Distortion::Kind::Cte:
            return DistortionMeasure::atoms_only({{sigma.alpha(), 1.0}});
        case Distortion::Kind::Polynomial: {
            std::vector<DistortionMeasure::Atom> atoms;
            const double at_zero = sigma.coefficients()[0];
            if (at_zero > kMonotoneTol) atoms.push_back({0.0, at_zero});
            std::vector<double> g = poly_derivative(sigma.coefficients());
            if (g.empty()) return DistortionMeasure::atoms_only(std::move(atoms));
            return DistortionMeasure::with_polynomial_intensity(std::move(atoms), std::move(g));
        }
        case Distortion::Kind::Table: {
            const std::vector<double>& v = sigma.table_values();
            std::vector<DistortionMeasure::Atom> atoms;
            if (v.front() > kMonotoneTol) atoms.push_back({0.0, v.front()});
            const double n = static_cast<double>(v.size() - 1);
            std::vector<double> g(v.size() - 1);
            bool any = false;
            for (std::size_t k = 0; k + 1 < v.size(); ++k) {
                g[k] = std::max(0.0, (v[k + 1] - v[k]) * n);
                any = any || g[k] > 0.0;
            }
            if (!any) return DistortionMeasure::atoms_only(std::move(atoms));
            return DistortionMeasure::with_grid_intensity(std::move(atoms), std::move(g));
        }
    }
    throw std::logic_error("unreachable distortion kind");
}

Distortion distortion_from_measure(const DistortionMeasure& mu) {
    if (mu.has_atom_at_one())
        throw std::invalid_argument(
            "unsupported measure: an atom at 1 has no distortion density");
    const auto& atoms = mu.atoms();
    if (mu.ac_kind() == DistortionMeasure::AcKind::None && atoms.size() == 1)
        return Distortion::cte(atoms[0].location);
    double base = 0.0;
    for (const auto& a : atoms) {
        if (a.location > kMonotoneTol)
            throw std::invalid_argument(
                "unsupported measure: interior atoms other than a single Dirac are not "
                "representable on the density grid");
        base += a.mass;
    }
    switch (mu.ac_kind()) {
        case DistortionMeasure::AcKind::None:
            return Distortion::polynomial({base});
        case DistortionMeasure::AcKind::Polynomial: {
            std::vector<double> coeffs = poly_antiderivative(mu.intensity_coefficients());
            coeffs[0] = base;
            return Distortion::polynomial(std::move(coeffs));
        }
        case DistortionMeasure::AcKind::Grid: {
            const std::vector<double>& g = mu.intensity_segments();
            const double step = 1.0 / static_cast<double>(g.size());
            std::vector<double> values(g.size() + 1);
            long double acc = base;
            values[0] = base;
            for (std::size_t k = 0; k < g.size(); ++k) {
                acc += static_cast<long double>(g[k]) * step;
                values[k + 1] = static_cast<double>(acc);
            }
            return Distortion::table(std::move(values));
        }
    }
    throw std::logic_error("unreachable measure kind");
}

}  // namespace dpr
