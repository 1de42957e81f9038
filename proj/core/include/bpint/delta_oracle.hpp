#ifndef BPINT_DELTA_ORACLE_HPP
#define BPINT_DELTA_ORACLE_HPP

#include "bpint/estimate.hpp"

#include <cstdint>
#include <vector>

namespace bpint::delta_oracle {

// Angular weight inserted into the constrained angle integral.
// Unit/R1 is a constant; R2, R3 are the honeycomb two-particle weights
// cos(phi_1 + phi_1') and cos(phi_1 + phi_1') cos(phi_2 + phi_2'),
// defined for dimension 2, N = 2 only.
enum class Weight { Unit, R1, R2, R3 };

// N-particle umklapp geometry on concentric circular (2D) or spherical (3D)
// Fermi surfaces.  radii holds the 2N dimensionless momentum magnitudes,
// g the reciprocal-vector magnitude, phi_dk the direction of the target
// vector (2D).  Slot n carries sign (-1)^(n-1): odd slots are outgoing.
struct ScatterSpec {
    int dimension = 2;
    int N = 1;
    std::vector<double> radii;
    double g = 1.0;
    Weight weight = Weight::Unit;
    double phi_dk = 0.0;

    ScatterSpec() = default;
    ScatterSpec(int dimension_, int N_, std::vector<double> radii_, double g_,
                Weight weight_ = Weight::Unit, double phi_dk_ = 0.0);
};

struct OracleBudget {
    int grid = 256;                 // cells per axis, deterministic N<=2 grid
    long samples = 1L << 18;        // QMC samples, N >= 3
    long mc_samples = 1L << 20;     // smeared-delta Monte Carlo (3D cross-check)
    bool run_mc_cross_check = false;
    std::uint64_t seed = 0x42u;
};

struct ThresholdFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double epsilon_lo = 0.0;
    double epsilon_hi = 0.0;
    int points = 0;
};

// 2D constrained angular integral (the delta-function form of the Bessel
// product with alpha = 2).  The first 2N-2 angles are integrated over a
// product grid (N <= 2) or a shifted-Halton QMC set (N >= 3); the last two
// angles are solved from the two delta constraints by two-circle
// intersection, each branch weighted by 1/(c_a c_b |sin(phi_a - phi_b)|).
// Returns exactly 0 with zero error when the geometry is infeasible.
Estimate eval_2d_angular(const ScatterSpec& spec, const OracleBudget& budget = {});

// 3D spherical version: the exact product-to-sum expansion of
// int_0^inf r^2 prod j_0(c_n r) dr, with an optional smeared-delta
// Monte-Carlo cross-check recorded in the Estimate.
Estimate eval_3d_angular(const ScatterSpec& spec, const OracleBudget& budget = {});

// Exact value of int_0^inf r^2 prod_n j_0(c_n r) dr for 3..12 coefficients.
// Expands the sine product into single sines/cosines and applies the
// regularized 1/r^p moment integrals termwise.  If a frequency cancels
// exactly (boundary polygon), the principal value is used and
// *conditional_note is set.
double trig_expansion_3d(const std::vector<double>& coefficients,
                         bool* conditional_note = nullptr);

// Evaluate f at g = sum(radii) - eps for each eps, fit log f vs log eps,
// return the least-squares exponent with its standard error.
// Non-positive f values trigger a window-shrink retry before erroring out.
ThresholdFit threshold_scan(const ScatterSpec& spec,
                            const std::vector<double>& epsilon_grid,
                            const OracleBudget& budget = {});

} // namespace bpint::delta_oracle

#endif
