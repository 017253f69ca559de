#include "dpr/actuarial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dpr/conjugate.hpp"
#include "dpr/premium.hpp"

namespace dpr {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void check_age(const LifeTable& table, int age) {
    if (age < table.base_age || age > table.max_age()) {
        std::ostringstream os;
        os << "age " << age << " outside the table range [" << table.base_age << ", "
           << table.max_age() << "]";
        fail(os.str());
    }
}

// Cumulative death probabilities kq_x for k = 0 .. remaining length; the
// last entry is exactly 1.
std::vector<double> cumulative_deaths(const LifeTable& table, int age) {
    const std::size_t offset = static_cast<std::size_t>(age - table.base_age);
    const std::size_t m = table.q.size() - offset;
    std::vector<double> kq(m + 1);
    kq[0] = 0.0;
    double survival = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
        survival *= 1.0 - table.q[offset + k];
        kq[k + 1] = 1.0 - survival;
    }
    kq[m] = 1.0;
    return kq;
}

}  // namespace

LifeTable::LifeTable(int base, std::vector<double> qs) : base_age(base), q(std::move(qs)) {
    if (q.empty()) fail("life table requires at least one age");
    for (std::size_t i = 0; i < q.size(); ++i)
        if (!(q[i] >= 0.0 && q[i] <= 1.0)) {
            std::ostringstream os;
            os << "death probability at age " << base_age + static_cast<int>(i)
               << " outside [0,1]";
            fail(os.str());
        }
    if (q.back() != 1.0) fail("life table must end with a terminal death probability of 1");
}

double LifeTable::q_at(int age) const {
    if (age < base_age || age > max_age()) fail("age outside the table range");
    return q[static_cast<std::size_t>(age - base_age)];
}

LifeTable load_life_table(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) fail("cannot open life table file: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) fail("empty life table file: " + csv_path);
    // header: age,qx
    std::vector<int> ages;
    std::vector<double> qs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string age_field, q_field;
        if (!std::getline(row, age_field, ',') || !std::getline(row, q_field))
            fail("malformed life table row: " + line);
        ages.push_back(std::stoi(age_field));
        qs.push_back(std::stod(q_field));
    }
    if (ages.empty()) fail("life table has no rows: " + csv_path);
    for (std::size_t i = 1; i < ages.size(); ++i)
        if (ages[i] != ages[i - 1] + 1) fail("life table ages must be consecutive");
    return LifeTable(ages.front(), std::move(qs));
}

void save_life_table(const LifeTable& table, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) fail("cannot write life table file: " + csv_path);
    out << "age,qx\n";
    out.precision(17);
    for (std::size_t i = 0; i < table.q.size(); ++i)
        out << table.base_age + static_cast<int>(i) << ',' << table.q[i] << '\n';
}

LossModel curtate_lifetime(const LifeTable& table, int age) {
    check_age(table, age);
    const std::vector<double> kq = cumulative_deaths(table, age);
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t k = 0; k + 1 < kq.size(); ++k) {
        const double prob = kq[k + 1] - kq[k];
        if (prob > 0.0) atoms.push_back({static_cast<double>(k), prob});
    }
    return LossModel::discrete(std::move(atoms));
}

LifeTable distorted_life_table(const Distortion& sigma, const LifeTable& table, int age) {
    check_age(table, age);
    const std::vector<double> kq = cumulative_deaths(table, age);
    const std::size_t m = kq.size() - 1;
    std::vector<double> q_new(m);
    double survival = 1.0;  // distorted survival 1 - tau(kq)
    for (std::size_t k = 0; k < m; ++k) {
        const double death = sigma.tau(kq[k + 1]) - sigma.tau(kq[k]);
        q_new[k] = survival > 0.0 ? std::clamp(death / survival, 0.0, 1.0) : 1.0;
        survival -= death;
    }
    q_new[m - 1] = 1.0;
    return LifeTable(age, std::move(q_new));
}

double expectancy_distorted_probs(const Distortion& sigma, const LifeTable& table, int age) {
    return premium_direct(sigma, curtate_lifetime(table, age));
}

double expectancy_distorted_outcomes(const Distortion& sigma, const LifeTable& table,
                                     int age) {
    const LossModel lifetime = curtate_lifetime(table, age);
    return expectation(build_h_sigma(sigma, lifetime), lifetime);
}

ExpectancyCurve reserve_curves(const Distortion& sigma, const LifeTable& table, int x0,
                               int horizon) {
    if (horizon < 0) fail("reserve horizon must be nonnegative");
    check_age(table, x0);
    check_age(table, x0 + horizon);

    const LifeTable distorted = distorted_life_table(sigma, table, x0);
    const PiecewiseLinearConvex h = build_h_sigma(sigma, curtate_lifetime(table, x0));

    ExpectancyCurve curve;
    for (int x = x0; x <= x0 + horizon; ++x) {
        const LossModel remaining = curtate_lifetime(table, x);
        curve.ages.push_back(x);
        curve.net.push_back(remaining.mean());
        curve.distorted_probability.push_back(curtate_lifetime(distorted, x).mean());
        curve.distorted_outcome.push_back(expectation(h, remaining));
    }
    return curve;
}

}  // namespace dpr
