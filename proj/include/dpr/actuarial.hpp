#ifndef DPR_ACTUARIAL_HPP
#define DPR_ACTUARIAL_HPP

#include <string>
#include <vector>

#include "dpr/distortion.hpp"
#include "dpr/loss_model.hpp"

namespace dpr {

/// Ages with one-year death probabilities q_x; the final entry is exactly 1
/// so the curtate lifetime has finite support.
struct LifeTable {
    int base_age = 0;
    std::vector<double> q;

    LifeTable(int base_age, std::vector<double> q);
    int max_age() const { return base_age + static_cast<int>(q.size()) - 1; }
    double q_at(int age) const;
};

LifeTable load_life_table(const std::string& csv_path);
void save_life_table(const LifeTable& table, const std::string& csv_path);

/// Curtate future lifetime at age x: atoms (k, kp_x * q_{x+k}).
LossModel curtate_lifetime(const LifeTable& table, int age);

/// New table with death-curve probabilities tau(q_{k+1}) - tau(q_k) taken
/// from the distorted cumulative death probabilities, re-solved to one-year
/// rates; base age moves to the evaluation age.
LifeTable distorted_life_table(const Distortion& sigma, const LifeTable& table, int age);

/// Distorted life expectancy through distorted probabilities
/// (equals the distorted premium of the curtate lifetime).
double expectancy_distorted_probs(const Distortion& sigma, const LifeTable& table, int age);

/// Distorted life expectancy through distorted outcomes:
/// sum of h_sigma(k) * kp_x q_{x+k} with h_sigma built at the same age.
double expectancy_distorted_outcomes(const Distortion& sigma, const LifeTable& table,
                                     int age);

struct ExpectancyCurve {
    std::vector<int> ages;
    std::vector<double> net;
    std::vector<double> distorted_probability;
    std::vector<double> distorted_outcome;
};

/// Conditional further life expectancy over attained ages in
/// [x0, x0 + horizon]:
///  - net: from the original table;
///  - distorted probabilities: from the new table built once at x0;
///  - distorted outcomes: h_sigma frozen at x0, applied to the remaining
///    lifetime under the original probabilities.
ExpectancyCurve reserve_curves(const Distortion& sigma, const LifeTable& table, int x0,
                               int horizon);

}  // namespace dpr

#endif
