#ifndef DPR_DISTORTION_HPP
#define DPR_DISTORTION_HPP

#include <cstddef>
#include <vector>

namespace dpr {

/// A distortion density: nondecreasing, nonnegative function on [0,1] with
/// unit integral.  Three representations are supported:
///   - Cte:         sigma_a(u) = 1/(1-a) * 1_{(a,1]}(u), the tail-expectation family
///   - Polynomial:  closed-form coefficients in u
///   - Table:       values on a uniform grid of [0,1], linear interpolation
///
/// tau(p) denotes the antiderivative of the density; it is convex,
/// nonnegative, satisfies tau(1) = 1 and tau(p) <= p.  Generalized inverses
/// use the left-continuous inf convention throughout.
class Distortion {
  public:
    enum class Kind { Cte, Polynomial, Table };

    static Distortion cte(double alpha);
    static Distortion polynomial(std::vector<double> coefficients);
    static Distortion table(std::vector<double> values);

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    const std::vector<double>& table_values() const { return values_; }

    /// Density value; at a jump of the Cte family this is the left limit,
    /// except at u = 0 where the right limit is used (so the identity
    /// distortion evaluates to 1 everywhere).
    double density(double u) const;
    /// Right-continuous density value sigma(u+).
    double density_right(double u) const;
    /// Generalized inverse of the density: inf{u : sigma(u) >= s}.
    double density_inverse(double s) const;
    /// Mass of d(sigma) on (a, b], i.e. sigma(b+) - sigma(a+).
    double increment(double a, double b) const;

    double min_density() const { return density(0.0); }
    double max_density() const { return density_right(1.0); }

    /// tau(p) = integral of the density over [0, p]; exact for all kinds.
    double tau(double p) const;
    /// inf{p : tau(p) >= u}, left-continuous convention.
    double tau_inverse(double u) const;

    /// integral of sigma^2 over [0,1], exact (Hoelder bound with q = 2).
    double squared_norm() const;

    /// Interior points where the density or its derivative is discontinuous.
    std::vector<double> kink_points() const;

  private:
    Distortion() = default;

    Kind kind_ = Kind::Cte;
    double alpha_ = 0.0;                // Cte level
    std::vector<double> coeffs_;        // Polynomial
    std::vector<double> values_;        // Table node values
    std::vector<double> cum_;           // Table cumulative integral at nodes
};

/// Probability measure on [0,1] associated with a distortion:
/// mu(A) = sigma(0) delta_0(A) + integral_A (1-a) d sigma(a).
///
/// Atoms are stored explicitly.  The absolutely continuous part is stored
/// through its intensity g = d sigma / d alpha (the measure's density is
/// (1-a) g(a)), which keeps integrals of the parts exact.
class DistortionMeasure {
  public:
    struct Atom {
        double location;
        double mass;
    };
    enum class AcKind { None, Polynomial, Grid };

    static DistortionMeasure atoms_only(std::vector<Atom> atoms);
    static DistortionMeasure with_polynomial_intensity(std::vector<Atom> atoms,
                                                       std::vector<double> g_coeffs);
    /// g piecewise constant on the uniform segments of [0,1].
    static DistortionMeasure with_grid_intensity(std::vector<Atom> atoms,
                                                 std::vector<double> g_segments);

    const std::vector<Atom>& atoms() const { return atoms_; }
    AcKind ac_kind() const { return ac_kind_; }
    const std::vector<double>& intensity_coefficients() const { return g_coeffs_; }
    const std::vector<double>& intensity_segments() const { return g_segments_; }

    double ac_intensity(double a) const;                 // g(a)
    double ac_density(double a) const;                   // (1-a) g(a)
    double ac_mass(double a, double b) const;            // exact measure of (a,b]
    double ac_increment(double a, double b) const;       // exact integral of g
    double total_mass() const;
    bool has_atom_at_one(double tol = 1e-12) const;
    std::vector<double> ac_kink_points() const;

  private:
    DistortionMeasure() = default;
    void validate() const;

    std::vector<Atom> atoms_;
    AcKind ac_kind_ = AcKind::None;
    std::vector<double> g_coeffs_;
    std::vector<double> g_segments_;
};

/// The Kusuoka-side measure of a distortion (exact per representation).
DistortionMeasure measure_from_distortion(const Distortion& sigma);

/// Reconstructs the distortion sigma_mu(a) = integral_{[0,a]} 1/(1-p) mu(dp).
/// Requires mu({1}) = 0.  Measures with interior atoms are supported only in
/// the single-Dirac case (which maps back to the Cte family).
Distortion distortion_from_measure(const DistortionMeasure& mu);

}  // namespace dpr

#endif
