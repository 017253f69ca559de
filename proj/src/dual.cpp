#include "dpr/dual.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dpr {

namespace {

std::vector<std::pair<double, double>> zip_atoms(const std::vector<double>& v,
                                                 const std::vector<double>& p) {
    std::vector<std::pair<double, double>> atoms(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) atoms[i] = {v[i], p[i]};
    return atoms;
}

void require_discrete(const LossModel& model) {
    if (!model.is_discrete())
        throw std::runtime_error("dual oracle requires a discrete loss model");
}

}  // namespace

DualVariable::DualVariable(std::vector<double> z_values, std::vector<double> probabilities)
    : z(std::move(z_values)), p(std::move(probabilities)) {
    if (z.size() != p.size() || z.empty())
        throw std::invalid_argument("dual variable requires matching z and probability lists");
    long double sum = 0.0L;
    for (double q : p) {
        if (!(q > 0.0)) throw std::invalid_argument("dual variable probabilities must be positive");
        sum += q;
    }
    if (std::fabs(static_cast<double>(sum) - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "dual variable probabilities must sum to 1, got " << static_cast<double>(sum);
        throw std::invalid_argument(os.str());
    }
}

LossModel DualVariable::distribution() const { return LossModel::discrete(zip_atoms(z, p)); }

double DualVariable::expectation() const {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < z.size(); ++i) acc += static_cast<long double>(z[i]) * p[i];
    return static_cast<double>(acc);
}

double DualVariable::min_value() const { return *std::min_element(z.begin(), z.end()); }

TailEnvelope::TailEnvelope(Distortion sigma) : sigma_(std::move(sigma)) {}

double TailEnvelope::operator()(double a) const { return 1.0 - sigma_.tau(a); }

FeasibilityResult is_feasible(const DualVariable& Z, const Distortion& sigma, double tol) {
    FeasibilityResult result;
    result.mean_defect = Z.expectation() - 1.0;
    if (std::fabs(result.mean_defect) > tol) {
        result.feasible = false;
        return result;
    }
    const LossModel dist = Z.distribution();
    const TailEnvelope envelope(sigma);

    std::vector<double> levels;
    levels.push_back(0.0);
    const auto& cum = dist.cumulative();
    levels.insert(levels.end(), cum.begin(), cum.end());
    if (sigma.kind() == Distortion::Kind::Polynomial) {
        for (int j = 1; j <= 64; ++j)
            levels.push_back(0.5 * (1.0 - std::cos(M_PI * static_cast<double>(j) / 65.0)));
    }
    std::sort(levels.begin(), levels.end());

    result.feasible = true;
    for (double a : levels) {
        const double tail = dist.tail_quantile_integral(a);
        const double bound = envelope(a);
        if (tail > bound + tol) {
            result.feasible = false;
            result.violating_alpha = a;
            result.binding_alphas.clear();
            return result;
        }
        if (std::fabs(tail - bound) <= tol) result.binding_alphas.push_back(a);
    }
    return result;
}

bool nonnegativity_check(const DualVariable& Z, const Distortion& sigma) {
    if (!is_feasible(Z, sigma).feasible) return true;
    return Z.min_value() >= -1e-12;
}

SupOracleResult sup_oracle(const Distortion& sigma, const LossModel& model,
                           std::size_t trials, std::uint64_t seed) {
    require_discrete(model);
    if (trials < 1) throw std::invalid_argument("sup oracle requires at least one trial");
    const auto& v = model.values();
    const auto& cum = model.cumulative();
    const auto& p = model.probabilities();
    const std::size_t n = v.size();

    std::vector<double> z(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = sigma.tau(std::min(cum[i], 1.0));
        z[i] = (t - prev) / p[i];
        prev = t;
    }
    const DualVariable candidate(z, p);
    const FeasibilityResult candidate_check = is_feasible(candidate, sigma);
    if (!candidate_check.feasible)
        throw std::runtime_error("co-monotone dual candidate failed the feasibility check");

    auto value_of = [&](const std::vector<double>& zz) {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
            acc += static_cast<long double>(v[i]) * zz[i] * p[i];
        return static_cast<double>(acc);
    };

    SupOracleResult result;
    result.candidate_value = value_of(z);
    result.best_value = result.candidate_value;
    result.trials = trials;
    result.binding_alphas = candidate_check.binding_alphas;
    if (n < 2) return result;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double spread = sigma.max_density() - sigma.min_density() + 1.0;
    std::vector<double> current = z;
    std::vector<double> trial_z = z;
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        double transfer = unif(rng) * 0.5 * spread * std::min(p[i], p[j]);
        bool moved = false;
        for (int halving = 0; halving < 40 && transfer != 0.0; ++halving) {
            trial_z = current;
            trial_z[i] += transfer / p[i];
            trial_z[j] -= transfer / p[j];
            if (is_feasible(DualVariable(trial_z, p), sigma).feasible) {
                moved = true;
                break;
            }
            transfer *= 0.5;
        }
        if (!moved) continue;
        current = trial_z;
        result.best_value = std::max(result.best_value, value_of(current));
    }
    return result;
}

std::pair<double, double> cte_dual_forms(double alpha, const LossModel& model) {
    require_discrete(model);
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::domain_error("dual forms require a level in [0,1)");
    const auto& v = model.values();
    const auto& p = model.probabilities();
    const std::size_t n = v.size();

    // Greedy fill: mass 1-alpha from the largest atoms down, Z capped at
    // 1/(1-alpha).
    std::vector<double> z(n, 0.0);
    long double value = 0.0L;
    double remaining = 1.0 - alpha;
    for (std::size_t i = n; i-- > 0 && remaining > 0.0;) {
        const double take = std::min(p[i], remaining);
        z[i] = take / (p[i] * (1.0 - alpha));
        value += static_cast<long double>(v[i]) * take;
        remaining -= take;
    }
    const double closed = static_cast<double>(value) / (1.0 - alpha);

    // The same optimizer checked against the recursive constraint family
    // CTE_p(Z) <= 1/(1-alpha), i.e. feasibility for the level-alpha density.
    const DualVariable optimizer(z, p);
    const double cap = 1.0 / (1.0 - alpha);
    for (double zi : z)
        if (zi > cap * (1.0 + 1e-12))
            throw std::runtime_error("dual optimizer exceeds the level cap");
    if (!is_feasible(optimizer, Distortion::cte(alpha)).feasible)
        throw std::runtime_error("dual optimizer failed the recursive constraint check");
    long double recursive = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
        recursive += static_cast<long double>(v[i]) * z[i] * p[i];
    return {closed, static_cast<double>(recursive)};
}

}  // namespace dpr
