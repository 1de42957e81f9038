#include "bpint/specfun.hpp"
#include "bpint/errors.hpp"
#include "gauss_nodes.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace bpint::detail {

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::unordered_map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return cache.emplace(n, std::move(r)).first->second;
}

} // namespace bpint::detail

namespace bpint::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool near_integer(double v, double tol) {
    return std::abs(v - std::round(v)) <= tol;
}

// sin(pi*x) with exact argument reduction; exact zero at integer x.
double sin_pi(double x) {
    const double n = std::round(x);
    const double r = x - n;
    if (r == 0.0) return 0.0;
    const double s = std::sin(kPi * r);
    return (static_cast<long long>(n) % 2 == 0) ? s : -s;
}

// -------------------------------------------------------------------------
// J0 / J1 power series, long double accumulation.  Used for x < 9 where the
// largest term is ~I_0(9) ~ 1.1e3, so the accumulated rounding stays below
// 1e-15 in 80-bit arithmetic.
double j0_series(double x) {
    const long double q = -(long double)x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 60; ++k) {
        term *= q / ((long double)k * k);
        sum += term;
        if (std::abs((double)term) < 1e-19 * (1.0 + std::abs((double)sum))) break;
    }
    return (double)sum;
}

double j1_series(double x) {
    const long double q = -(long double)x * x / 4.0L;
    long double term = (long double)x / 2.0L, sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= q / ((long double)k * (k + 1));
        sum += term;
        if (std::abs((double)term) < 1e-19 * (1.0 + std::abs((double)sum))) break;
    }
    return (double)sum;
}

// -------------------------------------------------------------------------
// Exact integral representation for integer order,
//   J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt.
// The integrand extends to a smooth 2pi-periodic even function, so the
// trapezoid rule converges geometrically; aliasing is ~J_{2m-n}(x).
double jn_trapezoid(int n, double x) {
    const int m = 2 * (int)std::ceil((x + std::abs((double)n) + 42.0) / 2.0);
    const double h = kPi / m;
    double acc = 0.5 * (1.0 + std::cos(n * kPi)); // endpoints
    for (int k = 1; k < m; ++k) {
        const double t = k * h;
        acc += std::cos(n * t - x * std::sin(t));
    }
    return acc * h / kPi;
}

// Real order on [0,pi] plus the Schlaefli tail,
//   J_nu(x) = (1/pi) int_0^pi cos(nu t - x sin t) dt
//           - sin(nu pi)/pi int_0^inf exp(-x sinh s - nu s) ds.
// Gauss-Legendre on both pieces; intended for x >= 9 and |nu| <= x.
double jnu_integral_rep(double nu, double x) {
    const int n1 = 16 * (int)std::ceil((0.8 * (x + std::abs(nu)) + 40.0) / 16.0);
    const double main_part = detail::gauss_integrate(
        [&](double t) { return std::cos(nu * t - x * std::sin(t)); }, 0.0, kPi, n1) / kPi;

    const double snp = sin_pi(nu);
    if (snp == 0.0) return main_part;

    // Truncate where x*sinh(s) + nu*s has climbed ~46 above its minimum.
    double smax = std::asinh((46.0 + 3.0 * std::abs(nu)) / x) + 1.0;
    const double tail = detail::gauss_integrate(
        [&](double s) { return std::exp(-x * std::sinh(s) - nu * s); }, 0.0, smax, 64);
    return main_part - snp / kPi * tail;
}

// -------------------------------------------------------------------------
// Hankel asymptotic expansion, valid for x well above the turning point:
//   J_nu(x) = sqrt(2/(pi x)) [ P cos(chi) - Q sin(chi) ],
//   chi = x - nu pi/2 - pi/4.
double jnu_hankel(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    const double ei = 1.0 / (8.0 * x);
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k < 40; ++k) {
        const double f = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) * ei / k;
        term *= f;
        if (std::abs(term) >= prev) break; // asymptotic series: stop at min term
        prev = std::abs(term);
        switch (k % 4) {
        case 1: q += term; break;
        case 2: p -= term; break;
        case 3: q -= term; break;
        case 0: p += term; break;
        }
        if (std::abs(term) < 1e-18) break;
    }
    const double chi = x - nu * (kPi / 2.0) - kPi / 4.0;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Upward three-term recurrence from (J_base, J_base+1); stable for order < x.
double recur_up(double base, double j_lo, double j_hi, double target, double x) {
    double nu = base + 1.0;
    while (nu < target - 0.5) {
        const double next = (2.0 * nu / x) * j_hi - j_lo;
        j_lo = j_hi;
        j_hi = next;
        nu += 1.0;
    }
    return j_hi;
}

// Miller downward recurrence for integer order, normalized with
// J_0 + 2 J_2 + 2 J_4 + ... = 1.  Used when 2 <= x <= n-ish.
double jn_miller(int n, double x) {
    const int start = n + 42 + (int)(x / 2.0);
    const int nmax = start + (start % 2); // even order at the top
    std::vector<double> vals((std::size_t)nmax + 1, 0.0);
    double jp = 0.0, jc = 1e-300;
    vals[nmax] = jc;
    for (int k = nmax; k >= 1; --k) {
        const double jm = (2.0 * k / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (std::abs(jc) > 1e250) {
            const double s = 1e-250;
            jc *= s;
            jp *= s;
            for (int i = k; i <= nmax; ++i) vals[i] *= s;
        }
        vals[k - 1] = jc;
    }
    double norm = vals[0];
    for (int k = 2; k <= nmax; k += 2) norm += 2.0 * vals[k];
    return vals[n] / norm;
}

// Integer order, x below the asymptotic switchover.
double jn_int_small(int n, double x) {
    if (n == 0) return (x < 9.0) ? j0_series(x) : jn_trapezoid(0, x);
    if (n == 1) return (x < 9.0) ? j1_series(x) : jn_trapezoid(1, x);
    if (x > 1.2 * n) {
        const double j0 = jn_int_small(0, x);
        const double j1 = jn_int_small(1, x);
        return recur_up(0.0, j0, j1, n, x);
    }
    if (x < 0.5) {
        // leading series terms; no cancellation for x << n
        double t = 1.0;
        for (int k = 1; k <= n; ++k) t *= x / (2.0 * k);
        const double q = x * x / 4.0;
        return t * (1.0 - q / (n + 1.0) * (1.0 - q / (2.0 * (n + 2.0))));
    }
    return jn_miller(n, x);
}

} // namespace

Order::Order(double nu) : value(nu) {
    if (!std::isfinite(nu)) throw domain_error("Order: value must be finite");
    is_integer = near_integer(nu, classify_tol);
    is_half_integer = !is_integer && near_integer(nu - 0.5, classify_tol);
}

double bessel_j(Order nu, double x) {
    if (!std::isfinite(x)) throw domain_error("bessel_j: x must be finite");
    if (x < 0.0) throw domain_error("bessel_j: x must be nonnegative");
    const double v = nu.value;

    if (x == 0.0) {
        if (v == 0.0 || (nu.is_integer && std::llround(v) == 0)) return 1.0;
        if (v > 0.0) return 0.0;
        if (nu.is_integer) return 0.0;
        // J_nu(x) ~ (x/2)^nu / Gamma(nu+1) -> +-inf for negative non-integer nu
        const double rg = reciprocal_gamma(v + 1.0);
        return std::copysign(std::numeric_limits<double>::infinity(), rg);
    }

    if (nu.is_integer) {
        long long n = std::llround(v);
        double sign = 1.0;
        if (n < 0) {
            n = -n;
            if (n % 2 != 0) sign = -1.0;
        }
        const double x_asym = std::max(20.0, 2.0 * (double)n);
        if (x >= x_asym) {
            if (n == 0) return sign * jnu_hankel(0.0, x);
            const double j0 = jnu_hankel(0.0, x);
            const double j1 = jnu_hankel(1.0, x);
            if (n == 1) return sign * j1;
            return sign * recur_up(0.0, j0, j1, (double)n, x);
        }
        return sign * jn_int_small((int)n, x);
    }

    if (nu.is_half_integer) {
        const long long m = std::llround(v - 0.5);
        const double scale = std::sqrt(2.0 * x / kPi);
        if (m >= 0) return scale * spherical_j((int)m, x);
        const int k = (int)(-m - 1);
        const double s = (k % 2 == 0) ? -1.0 : 1.0; // (-1)^(k+1)
        return s * scale * spherical_y(k, x);
    }

    // general real order
    const double x_asym = std::max(20.0, 2.0 * std::abs(v));
    if (x >= x_asym) {
        const double base = v - std::floor(v); // in [0,1)
        const double ja = jnu_hankel(base, x);
        const double jb = jnu_hankel(base + 1.0, x);
        if (std::abs(v - base) < 0.5) return ja;
        if (std::abs(v - (base + 1.0)) < 0.5) return jb;
        if (v > 0.0) return recur_up(base, ja, jb, v, x);
        // downward from (base, base+1) to negative order
        double hi = jb, lo = ja, mu = base;
        while (mu > v + 0.5) {
            const double prev = (2.0 * mu / x) * lo - hi;
            hi = lo;
            lo = prev;
            mu -= 1.0;
        }
        return lo;
    }
    if (x < 9.0) {
        // power series, entire in nu via 1/Gamma
        const double lx = std::log(x / 2.0);
        long double sum = 0.0L;
        const long double q = -(long double)x * x / 4.0L;
        long double pow_term = std::exp((long double)(v * lx));
        long double kfac = 1.0L;
        for (int k = 0; k < 80; ++k) {
            const double rg = reciprocal_gamma(v + k + 1.0);
            const long double term = pow_term / kfac * (long double)rg;
            sum += term;
            pow_term *= q; // accumulate (x/2)^v * (-x^2/4)^k
            kfac *= (long double)(k + 1);
            if (k > 4 && std::abs((double)term) < 1e-18 * (1.0 + std::abs((double)sum)))
                break;
        }
        return (double)sum;
    }
    return jnu_integral_rep(v, x);
}

double spherical_j(int n, double x) {
    if (n < 0) throw domain_error("spherical_j: n must be nonnegative");
    if (!std::isfinite(x)) throw domain_error("spherical_j: x must be finite");
    if (x < 0.0) throw domain_error("spherical_j: x must be nonnegative");
    if (x == 0.0) return (n == 0) ? 1.0 : 0.0;

    if (x < 0.6) {
        // power series x^n/(2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)...(2n+2k+1))
        double lead = 1.0;
        for (int k = 1; k <= n; ++k) lead *= x / (2.0 * k + 1.0);
        // lead = x^n/(2n+1)!!
        double term = 1.0, sum = 1.0;
        const double q = -x * x / 2.0;
        for (int k = 1; k < 40; ++k) {
            term *= q / (k * (2.0 * n + 2.0 * k + 1.0));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return lead * sum;
    }

    const double j0 = std::sin(x) / x;
    if (n == 0) return j0;
    const double j1 = (std::sin(x) / x - std::cos(x)) / x;
    if (n == 1) return j1;

    if (x > (double)n) {
        // upward recurrence, stable in the oscillatory regime
        double lo = j0, hi = j1;
        for (int k = 1; k < n; ++k) {
            const double next = (2.0 * k + 1.0) / x * hi - lo;
            lo = hi;
            hi = next;
        }
        return hi;
    }

    // Miller downward recurrence, normalized against j0 or j1.
    const int start = n + 42 + (int)(x / 2.0);
    std::vector<double> vals(start + 1, 0.0);
    double hp = 0.0, hc = 1e-300;
    vals[start] = hc;
    for (int k = start; k >= 1; --k) {
        double hm = (2.0 * k + 1.0) / x * hc - hp;
        hp = hc;
        hc = hm;
        if (std::abs(hc) > 1e250) {
            const double s = 1e-250;
            hc *= s;
            hp *= s;
            for (int i = k - 1; i <= start; ++i) vals[i] *= s;
        }
        vals[k - 1] = hc;
    }
    // normalize against whichever of j0, j1 is better conditioned
    if (std::abs(j0) >= std::abs(j1)) return vals[n] * (j0 / vals[0]);
    return vals[n] * (j1 / vals[1]);
}

double spherical_y(int n, double x) {
    if (n < 0) throw domain_error("spherical_y: n must be nonnegative");
    if (!(x > 0.0) || !std::isfinite(x)) throw domain_error("spherical_y: x must be positive");
    const double y0 = -std::cos(x) / x;
    if (n == 0) return y0;
    const double y1 = (-std::cos(x) / x - std::sin(x)) / x;
    if (n == 1) return y1;
    // y is the dominant solution: upward recurrence is always stable
    double lo = y0, hi = y1;
    for (int k = 1; k < n; ++k) {
        const double next = (2.0 * k + 1.0) / x * hi - lo;
        lo = hi;
        hi = next;
    }
    return hi;
}

double elliptic_k(double k) {
    if (!std::isfinite(k) || k < 0.0) throw domain_error("elliptic_k: need 0 <= k < 1");
    if (k >= 1.0)
        throw singularity_error("elliptic_k: K(k) diverges logarithmically as k -> 1");
    double a = 1.0;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    for (int i = 0; i < 60; ++i) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        a = an;
        b = bn;
        if (std::abs(a - b) <= 2e-16 * a) break;
    }
    return kPi / (2.0 * a);
}

double reciprocal_gamma(double x) {
    if (!std::isfinite(x)) throw domain_error("reciprocal_gamma: x must be finite");
    if (x <= 0.0 && x == std::floor(x)) return 0.0; // poles of Gamma
    int sign = 0;
    const double lg = log_abs_gamma(x, &sign);
    if (lg > 709.0) return 0.0; // 1/Gamma underflows
    return sign / std::exp(lg);
}

double log_abs_gamma(double x, int* sign) {
    if (x > 0.0) {
        if (sign) *sign = 1;
        return std::lgamma(x);
    }
    if (x == std::floor(x)) {
        if (sign) *sign = 0;
        return std::numeric_limits<double>::infinity();
    }
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    const double s = sin_pi(x);
    if (sign) *sign = (s > 0.0) ? 1 : -1;
    return std::log(kPi / std::abs(s)) - std::lgamma(1.0 - x);
}

std::uint64_t binomial(unsigned n, unsigned l) {
    if (l > n) throw domain_error("binomial: need 0 <= l <= n");
    if (l > n - l) l = n - l;
    std::uint64_t c = 1;
    for (unsigned i = 1; i <= l; ++i) {
        // c = c*(n-l+i)/i; the division is exact (c is C(n-l+i, i) after step i)
        std::uint64_t t;
        if (__builtin_mul_overflow(c, (std::uint64_t)(n - l + i), &t))
            throw domain_error("binomial: result overflows 64 bits");
        c = t / i;
    }
    return c;
}

double bessel_zero_mcmahon(double nu, int k) {
    if (k < 1) throw domain_error("bessel_zero_mcmahon: k >= 1");
    const double mu = 4.0 * nu * nu;
    const double b = (k + 0.5 * std::abs(nu) - 0.25) * kPi;
    const double c1 = (mu - 1.0) / (8.0 * b);
    const double c2 = 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * std::pow(8.0 * b, 3));
    double z = b - c1 - c2;
    if (!(z > 0.5 * b)) z = b; // guard against a blown-up correction at small k
    return z;
}

} // namespace bpint::specfun
