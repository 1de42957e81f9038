#ifndef BPINT_SPECFUN_HPP
#define BPINT_SPECFUN_HPP

#include <cstdint>

namespace bpint::specfun {

// Bessel order with tolerant integer / half-integer classification.
// Classification drives algorithm dispatch; the stored value is untouched.
struct Order {
    double value = 0.0;
    bool is_integer = false;
    bool is_half_integer = false;

    Order() = default;
    Order(double nu); // implicit on purpose: bessel_j(2.0, x) should just work

    static constexpr double classify_tol = 1e-12;
};

// Cylindrical Bessel function of the first kind, real order, x >= 0.
//
// Dispatch: power series for small x; an exact integral representation
// (trapezoid for integer order, Gauss-Legendre plus the Schlaefli tail for
// real order) in the middle; Hankel asymptotics with stable order recurrence
// beyond x = max(20, 2|nu|).  Half-integer orders go through the spherical
// closed forms.
double bessel_j(Order nu, double x);

// Spherical Bessel function j_n, n >= 0, x >= 0.  Analytic limit at x = 0.
double spherical_j(int n, double x);

// Spherical Neumann function y_n (dominant solution; upward recurrence is safe).
double spherical_y(int n, double x);

// Complete elliptic integral of the first kind, modulus convention
// K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t), 0 <= k < 1.
// Throws singularity_error at k >= 1.
double elliptic_k(double k);

// 1/Gamma(x), entire; returns exactly 0 at non-positive integers.
double reciprocal_gamma(double x);

// log |Gamma(x)| and the sign of Gamma(x); sign = 0 at non-positive integers.
double log_abs_gamma(double x, int* sign = nullptr);

// Exact binomial coefficient; throws on l outside [0, n] or uint64 overflow.
std::uint64_t binomial(unsigned n, unsigned l);

// Approximate k-th positive zero of J_nu (McMahon's expansion).  Good to a few
// percent for k = 1 and rapidly better; used for interval boundaries only.
double bessel_zero_mcmahon(double nu, int k);

} // namespace bpint::specfun

#endif
