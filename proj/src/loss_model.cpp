#include "dpr/loss_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dpr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbSumTol = 1e-12;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void check_prob_open(double u) {
    if (!(u > 0.0 && u <= 1.0)) {
        std::ostringstream os;
        os << "quantile level must lie in (0,1], got " << u;
        throw std::domain_error(os.str());
    }
}

}  // namespace

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double standard_normal_density(double z) {
    return 0.3989422804014326779 * std::exp(-0.5 * z * z);
}

double standard_normal_quantile(double u) {
    if (u <= 0.0) return -kInf;
    if (u >= 1.0) return kInf;
    if (u > 0.5) return -standard_normal_quantile(1.0 - u);
    // Hastings-type starting value, then Newton with the exact cdf.
    const double t = std::sqrt(-2.0 * std::log(u));
    double z = -(t - (2.30753 + 0.27061 * t) / (1.0 + 0.99229 * t + 0.04481 * t * t));
    for (int i = 0; i < 8; ++i) {
        const double density = standard_normal_density(z);
        if (density <= 0.0) break;
        double step = (standard_normal_cdf(z) - u) / density;
        step = std::clamp(step, -1.0, 1.0);
        z -= step;
        if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(z))) break;
    }
    return z;
}

// ---------------------------------------------------------------------------

void LossModel::build_discrete(std::vector<double> values, std::vector<double> probs) {
    if (values.empty()) fail("discrete model requires at least one atom");
    long double sum = 0.0L;
    for (double p : probs) {
        if (!(p > 0.0)) fail("discrete atom probabilities must be positive");
        sum += p;
    }
    if (std::fabs(static_cast<double>(sum) - 1.0) > kProbSumTol) {
        std::ostringstream os;
        os << "discrete probabilities must sum to 1, got " << static_cast<double>(sum);
        fail(os.str());
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    values_.clear();
    probs_.clear();
    for (std::size_t idx : order) {
        if (!std::isfinite(values[idx])) fail("discrete atom values must be finite");
        if (!values_.empty() && values[idx] == values_.back()) {
            probs_.back() += probs[idx];
        } else {
            values_.push_back(values[idx]);
            probs_.push_back(probs[idx]);
        }
    }
    cum_.resize(values_.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cum_[i] = static_cast<double>(acc);
    }
    cum_.back() = 1.0;
    suffix_moment_.assign(values_.size() + 1, 0.0);
    long double tail = 0.0L;
    for (std::size_t i = values_.size(); i-- > 0;) {
        tail += static_cast<long double>(values_[i]) * probs_[i];
        suffix_moment_[i] = static_cast<double>(tail);
    }
}

LossModel LossModel::discrete(std::vector<std::pair<double, double>> atoms) {
    LossModel m;
    m.kind_ = Kind::Discrete;
    std::vector<double> values, probs;
    values.reserve(atoms.size());
    probs.reserve(atoms.size());
    for (auto& [v, p] : atoms) {
        values.push_back(v);
        probs.push_back(p);
    }
    m.build_discrete(std::move(values), std::move(probs));
    return m;
}

LossModel LossModel::empirical(std::vector<double> samples) {
    if (samples.empty()) fail("empirical model requires at least one sample");
    LossModel m;
    m.kind_ = Kind::Empirical;
    const double w = 1.0 / static_cast<double>(samples.size());
    std::vector<double> probs(samples.size(), w);
    m.build_discrete(std::move(samples), std::move(probs));
    return m;
}

LossModel LossModel::normal(double mu, double sd) {
    if (!(sd > 0.0)) fail("normal model requires sd > 0");
    LossModel m;
    m.kind_ = Kind::Normal;
    m.a_ = mu;
    m.b_ = sd;
    return m;
}

LossModel LossModel::lognormal(double log_mu, double log_sd) {
    if (!(log_sd > 0.0)) fail("lognormal model requires log-sd > 0");
    LossModel m;
    m.kind_ = Kind::Lognormal;
    m.a_ = log_mu;
    m.b_ = log_sd;
    return m;
}

LossModel LossModel::exponential(double rate) {
    if (!(rate > 0.0)) fail("exponential model requires rate > 0");
    LossModel m;
    m.kind_ = Kind::Exponential;
    m.a_ = rate;
    return m;
}

LossModel LossModel::uniform(double lo, double hi) {
    if (!(lo < hi)) fail("uniform model requires lo < hi");
    LossModel m;
    m.kind_ = Kind::Uniform;
    m.a_ = lo;
    m.b_ = hi;
    return m;
}

double LossModel::cdf(double x) const {
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical: {
            const auto it = std::upper_bound(values_.begin(), values_.end(), x);
            return it == values_.begin() ? 0.0 : cum_[it - values_.begin() - 1];
        }
        case Kind::Normal:
            return standard_normal_cdf((x - a_) / b_);
        case Kind::Lognormal:
            return x > 0.0 ? standard_normal_cdf((std::log(x) - a_) / b_) : 0.0;
        case Kind::Exponential:
            return x > 0.0 ? -std::expm1(-a_ * x) : 0.0;
        case Kind::Uniform:
            return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
    }
    return 0.0;
}

double LossModel::quantile(double u) const {
    check_prob_open(u);
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical: {
            const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
            return values_[std::min<std::size_t>(it - cum_.begin(), values_.size() - 1)];
        }
        case Kind::Normal:
            if (u >= 1.0)
                throw std::domain_error("unbounded quantile: normal support has no maximum");
            return a_ + b_ * standard_normal_quantile(u);
        case Kind::Lognormal:
            if (u >= 1.0)
                throw std::domain_error("unbounded quantile: lognormal support has no maximum");
            return std::exp(a_ + b_ * standard_normal_quantile(u));
        case Kind::Exponential:
            if (u >= 1.0)
                throw std::domain_error("unbounded quantile: exponential support has no maximum");
            return -std::log1p(-u) / a_;
        case Kind::Uniform:
            return a_ + u * (b_ - a_);
    }
    return 0.0;
}

double LossModel::density(double x) const {
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical:
            throw std::runtime_error("no density: discrete and empirical models have atoms");
        case Kind::Normal:
            return standard_normal_density((x - a_) / b_) / b_;
        case Kind::Lognormal:
            return x > 0.0 ? standard_normal_density((std::log(x) - a_) / b_) / (b_ * x) : 0.0;
        case Kind::Exponential:
            return x >= 0.0 ? a_ * std::exp(-a_ * x) : 0.0;
        case Kind::Uniform:
            return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
    }
    return 0.0;
}

double LossModel::mean() const {
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical:
            return suffix_moment_[0];
        case Kind::Normal:
            return a_;
        case Kind::Lognormal:
            return std::exp(a_ + 0.5 * b_ * b_);
        case Kind::Exponential:
            return 1.0 / a_;
        case Kind::Uniform:
            return 0.5 * (a_ + b_);
    }
    return 0.0;
}

double LossModel::second_moment() const {
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical: {
            long double acc = 0.0L;
            for (std::size_t i = 0; i < values_.size(); ++i)
                acc += static_cast<long double>(values_[i]) * values_[i] * probs_[i];
            return static_cast<double>(acc);
        }
        case Kind::Normal:
            return a_ * a_ + b_ * b_;
        case Kind::Lognormal:
            return std::exp(2.0 * a_ + 2.0 * b_ * b_);
        case Kind::Exponential:
            return 2.0 / (a_ * a_);
        case Kind::Uniform:
            return (a_ * a_ + a_ * b_ + b_ * b_) / 3.0;
    }
    return 0.0;
}

double LossModel::essinf() const {
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical:
            return values_.front();
        case Kind::Normal:
            return -kInf;
        case Kind::Lognormal:
        case Kind::Exponential:
            return 0.0;
        case Kind::Uniform:
            return a_;
    }
    return 0.0;
}

double LossModel::esssup() const {
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical:
            return values_.back();
        case Kind::Normal:
        case Kind::Lognormal:
        case Kind::Exponential:
            return kInf;
        case Kind::Uniform:
            return b_;
    }
    return 0.0;
}

bool LossModel::bounded_above() const { return std::isfinite(esssup()); }
bool LossModel::bounded_below() const { return std::isfinite(essinf()); }

double LossModel::tail_quantile_integral(double a) const {
    if (a >= 1.0) return 0.0;
    a = std::max(a, 0.0);
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical: {
            const auto it = std::upper_bound(cum_.begin(), cum_.end(), a);
            const std::size_t j = static_cast<std::size_t>(it - cum_.begin());
            if (j >= values_.size()) return 0.0;
            return values_[j] * (cum_[j] - a) + suffix_moment_[j + 1];
        }
        case Kind::Normal:
            return a_ * (1.0 - a) + b_ * standard_normal_density(standard_normal_quantile(a));
        case Kind::Lognormal:
            return std::exp(a_ + 0.5 * b_ * b_) *
                   standard_normal_cdf(b_ - standard_normal_quantile(a));
        case Kind::Exponential: {
            const double s = 1.0 - a;
            return s == 0.0 ? 0.0 : s * (1.0 - std::log(s)) / a_;
        }
        case Kind::Uniform:
            return a_ * (1.0 - a) + 0.5 * (b_ - a_) * (1.0 - a * a);
    }
    return 0.0;
}

double LossModel::partial_first_moment(double x1, double x2) const {
    if (!(x2 > x1)) return 0.0;
    switch (kind_) {
        case Kind::Discrete:
        case Kind::Empirical: {
            const std::size_t j1 = std::upper_bound(values_.begin(), values_.end(), x1) -
                                   values_.begin();
            const std::size_t j2 = std::upper_bound(values_.begin(), values_.end(), x2) -
                                   values_.begin();
            return suffix_moment_[j1] - suffix_moment_[j2];
        }
        case Kind::Normal: {
            const double z1 = (x1 - a_) / b_, z2 = (x2 - a_) / b_;
            const double dphi = (std::isfinite(z1) ? standard_normal_density(z1) : 0.0) -
                                (std::isfinite(z2) ? standard_normal_density(z2) : 0.0);
            return a_ * (standard_normal_cdf(z2) - standard_normal_cdf(z1)) + b_ * dphi;
        }
        case Kind::Lognormal: {
            auto lower_part = [&](double y) {
                if (y <= 0.0) return 0.0;
                if (!std::isfinite(y)) return std::exp(a_ + 0.5 * b_ * b_);
                return std::exp(a_ + 0.5 * b_ * b_) *
                       standard_normal_cdf((std::log(y) - a_) / b_ - b_);
            };
            return lower_part(x2) - lower_part(x1);
        }
        case Kind::Exponential: {
            auto lower_part = [&](double y) {
                if (y <= 0.0) return 0.0;
                if (!std::isfinite(y)) return 1.0 / a_;
                return (1.0 - std::exp(-a_ * y) * (1.0 + a_ * y)) / a_;
            };
            return lower_part(x2) - lower_part(x1);
        }
        case Kind::Uniform: {
            const double c1 = std::clamp(x1, a_, b_), c2 = std::clamp(x2, a_, b_);
            return 0.5 * (c2 * c2 - c1 * c1) / (b_ - a_);
        }
    }
    return 0.0;
}

double LossModel::probability_between(double x1, double x2) const {
    if (!(x2 > x1)) return 0.0;
    const double hi = std::isfinite(x2) ? cdf(x2) : 1.0;
    const double lo = std::isfinite(x1) ? cdf(x1) : 0.0;
    return hi - lo;
}

double LossModel::expected_excess(double q) const {
    if (q <= essinf()) return mean() - q;
    const double a = cdf(q);
    return tail_quantile_integral(a) - q * (1.0 - a);
}

double LossModel::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    u = std::clamp(u, 1e-300, 1.0 - 1e-16);
    return quantile(u);
}

const std::vector<double>& LossModel::values() const {
    if (!is_discrete()) throw std::runtime_error("atom access requires a discrete model");
    return values_;
}

const std::vector<double>& LossModel::probabilities() const {
    if (!is_discrete()) throw std::runtime_error("atom access requires a discrete model");
    return probs_;
}

const std::vector<double>& LossModel::cumulative() const {
    if (!is_discrete()) throw std::runtime_error("atom access requires a discrete model");
    return cum_;
}

// ---------------------------------------------------------------------------

UniformCoupling::UniformCoupling(std::size_t n) : n_(n) {
    if (n == 0) fail("uniform coupling requires at least one grid point");
}

double UniformCoupling::midpoint(std::size_t i) const {
    return (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n_));
}

std::vector<double> UniformCoupling::midpoints() const {
    std::vector<double> m(n_);
    for (std::size_t i = 0; i < n_; ++i) m[i] = midpoint(i);
    return m;
}

// ---------------------------------------------------------------------------

double distorted_cdf(const Distortion& sigma, const LossModel& model, double y) {
    return sigma.tau(model.cdf(y));
}

double distorted_quantile(const Distortion& sigma, const LossModel& model, double u) {
    check_prob_open(u);
    return model.quantile(sigma.tau_inverse(u));
}

double distorted_density(const Distortion& sigma, const LossModel& model, double y) {
    if (!model.has_density())
        throw std::runtime_error("no density: discrete and empirical models have atoms");
    return model.density(y) * sigma.density(model.cdf(y));
}

}  // namespace dpr
