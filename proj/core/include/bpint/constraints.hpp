#ifndef BPINT_CONSTRAINTS_HPP
#define BPINT_CONSTRAINTS_HPP

#include <cstddef>
#include <optional>
#include <vector>

namespace bpint {

// One Bessel factor J_nu(c * rho) of the half-line product integral.
struct Factor {
    double nu = 0.0; // order
    double c = 1.0;  // positive coefficient
};

// Parameterization of  int_0^inf rho^(alpha-1) prod_n J_{nu_n}(c_n rho) drho.
struct IntegralSpec {
    double alpha = 1.0;
    std::vector<Factor> factors;

    IntegralSpec() = default;
    IntegralSpec(double alpha_, std::vector<Factor> factors_);

    std::size_t M() const { return factors.size(); }

    // Index of the factor with the largest coefficient, and whether that
    // maximum is unique (ties checked to max_tie_tol relative).
    std::size_t max_index() const { return max_index_; }
    bool max_unique() const { return max_unique_; }

    double sum_c() const;       // sum of all coefficients
    double sum_c_others() const; // sum excluding the largest
    double c_max() const { return factors[max_index_].c; }
    double nu_sum() const;      // sum of all orders
    double mu() const;          // alpha + sum of orders

    static constexpr double max_tie_tol = 1e-12;

private:
    std::size_t max_index_ = 0;
    bool max_unique_ = true;
};

enum class Polygonal { Satisfied, Violated, Boundary };

struct ConstraintReport {
    bool convergent = false;
    Polygonal polygonal = Polygonal::Satisfied;
    std::optional<int> charge_neutral_m; // the positive integer m, if any
    bool max_unique = true;
    bool predicted_zero = false;
};

// Convergence window of the integral: -sum(nu) < alpha < M/2 + 1, both strict.
bool check_convergence(const IntegralSpec& spec);

// Polygonal constraint c_max < sum(others): can the coefficients close a polygon?
Polygonal check_polygonal(const IntegralSpec& spec, double tol = 1e-9);

// Charge neutrality: nu_max = sum(other nu) + alpha - 2m for a positive
// integer m.  Returns m if it exists within tol; throws
// indeterminate_max_error when the maximum coefficient is tied.
std::optional<int> check_charge_neutrality(const IntegralSpec& spec, double tol = 1e-9);

// Combined prediction: the integral vanishes identically iff it converges,
// the polygon cannot close, and charge neutrality holds.
ConstraintReport predict_vanishing(const IntegralSpec& spec);

const char* polygonal_name(Polygonal p);

} // namespace bpint

#endif
