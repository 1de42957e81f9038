#include "bpint/delta_oracle.hpp"
#include "bpint/errors.hpp"
#include "bpint/rng.hpp"
#include "gauss_nodes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace bpint::delta_oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kSinClip = 1e-8; // tangency cutoff on |sin(phi_a - phi_b)|

struct Vec2 {
    double x = 0.0, y = 0.0;
};

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

// sign carried by slot n (1-based): outgoing momenta (odd slots) enter with +.
double slot_sign(std::size_t idx0) { return (idx0 % 2 == 0) ? 1.0 : -1.0; }

// ---------------------------------------------------------------------------
// Geometry of the two solved angles: c_a u(phi_a) - c_b u(phi_b) = r.
// The point P = c_a u(phi_a) is the intersection of circles (0, c_a) and
// (r, c_b); |sin(phi_a - phi_b)| = rho * h / (c_a c_b) with h the chord height.
struct SolvedPair {
    bool feasible = false;
    double rho = 0.0;       // |r|
    double h = 0.0;         // height above the chord axis
    double phi_a[2] = {0, 0};
    double phi_b[2] = {0, 0};
};

SolvedPair solve_pair(const Vec2& r, double ca, double cb) {
    SolvedPair s;
    s.rho = norm(r);
    const double A = ca + cb, B = std::abs(ca - cb);
    if (s.rho < B || s.rho > A || s.rho <= 0.0) return s;
    const double along = (s.rho * s.rho + ca * ca - cb * cb) / (2.0 * s.rho);
    const double h2 = ca * ca - along * along;
    s.h = (h2 > 0.0) ? std::sqrt(h2) : 0.0;
    s.feasible = true;
    const double inv = 1.0 / s.rho;
    const double rx = r.x * inv, ry = r.y * inv; // r-hat
    for (int br = 0; br < 2; ++br) {
        const double hh = (br == 0) ? s.h : -s.h;
        const double px = along * rx - hh * ry;
        const double py = along * ry + hh * rx;
        s.phi_a[br] = std::atan2(py, px);
        s.phi_b[br] = std::atan2(py - r.y, px - r.x);
    }
    return s;
}

// Density of rho over one grid cell in the linearized map: the pushforward of
// the uniform cell through rho ~ rho_bar + g1*dphi1 + g2*dphi2 is the
// convolution of two uniforms, a symmetric trapezoid with half-spans a1, a2.
double trap_density(double t, double a1, double a2) {
    const double amax = std::max(a1, a2), amin = std::min(a1, a2);
    t = std::abs(t);
    const double full = a1 + a2;
    if (t >= full || !(amax > 0.0)) return 0.0;
    if (amin <= 1e-300 || t <= amax - amin) return 1.0 / (2.0 * amax);
    return (full - t) / (4.0 * amax * amin);
}

// Expectation of the per-branch Jacobian 1/(c_a c_b sigma(rho)) over the
// cell's trapezoid density, with out-of-annulus mass contributing zero.
// The substitution rho(psi)^2 = B^2 + (A^2-B^2) sin^2(psi) absorbs the
// square-root edge singularities exactly:
//   int j(rho) w(rho) drho = int 2 w(rho(psi)) dpsi / rho(psi).
double averaged_pair_jacobian(double rho_bar, double a1, double a2, double A,
                              double B, double rho_floor) {
    const double full = a1 + a2;
    double lo = std::max({rho_bar - full, B, rho_floor});
    double hi = std::min(rho_bar + full, A);
    if (!(hi > lo)) return 0.0;
    const double span2 = A * A - B * B;
    auto psi_of = [&](double rho) {
        double t = (rho * rho - B * B) / span2;
        return std::asin(std::sqrt(std::clamp(t, 0.0, 1.0)));
    };
    // split at the density knots so each psi-segment is smooth
    double bnd[4] = {lo, std::clamp(rho_bar - std::abs(a1 - a2), lo, hi),
                     std::clamp(rho_bar + std::abs(a1 - a2), lo, hi), hi};
    std::sort(bnd, bnd + 4);
    double total = 0.0;
    for (int s = 0; s < 3; ++s) {
        const double p1 = psi_of(bnd[s]), p2 = psi_of(bnd[s + 1]);
        if (!(p2 > p1)) continue;
        total += detail::gauss_integrate(
            [&](double psi) {
                const double sp = std::sin(psi);
                const double rho = std::sqrt(B * B + span2 * sp * sp);
                return 2.0 * trap_density(rho - rho_bar, a1, a2) / rho;
            },
            p1, p2, 10);
    }
    return total;
}

// Signed integral of 1/|u| over the triangle (origin, P, Q).
double inv_r_triangle(const Vec2& P, const Vec2& Q) {
    Vec2 e{Q.x - P.x, Q.y - P.y};
    const double len = norm(e);
    if (len < 1e-300) return 0.0;
    e.x /= len;
    e.y /= len;
    const double d = P.x * e.y - P.y * e.x; // signed distance of the edge line
    const double tp = std::max(norm(P) + e.x * P.x + e.y * P.y, 1e-300);
    const double tq = std::max(norm(Q) + e.x * Q.x + e.y * Q.y, 1e-300);
    return d * std::log(tq / tp);
}

struct PointEval {
    double value = 0.0;      // sum over branches of weight * jacobian
    double clipped = 0.0;    // magnitude dropped by cutoffs (error estimate)
};

// Evaluate the integrand at one outer-angle point.  a1, a2 are the cell's
// rho half-spans along each axis (both 0 for QMC, which only clips);
// corners, det_g are the exact cell-corner residuals and map determinant,
// used for the exact 1/rho core integral when the cell straddles rho = 0.
PointEval eval_outer_point(const ScatterSpec& spec, const double* phi_outer,
                           std::size_t d, double a1, double a2,
                           const Vec2* corners, double det_g) {
    const std::size_t n2 = spec.radii.size();
    const double ca = spec.radii[n2 - 2];
    const double cb = spec.radii[n2 - 1];

    Vec2 r{spec.g * std::cos(spec.phi_dk), spec.g * std::sin(spec.phi_dk)};
    for (std::size_t j = 0; j < d; ++j) {
        const double s = slot_sign(j);
        r.x -= s * spec.radii[j] * std::cos(phi_outer[j]);
        r.y -= s * spec.radii[j] * std::sin(phi_outer[j]);
    }

    const double A = ca + cb, B = std::abs(ca - cb);
    SolvedPair sol = solve_pair(r, ca, cb);
    const double rho = sol.rho;
    const double full = a1 + a2;

    double w_outer = 1.0;
    if (spec.weight == Weight::R2 || spec.weight == Weight::R3)
        w_outer = std::cos(phi_outer[0] + phi_outer[1]);

    auto weight_sum = [&](double rho_eval) {
        // sum of branch weights at a representative radius
        if (spec.weight != Weight::R3) return 2.0 * w_outer;
        Vec2 rc = r;
        if (rho > 1e-300) {
            rc.x *= rho_eval / rho;
            rc.y *= rho_eval / rho;
        } else {
            rc = Vec2{rho_eval, 0.0};
        }
        const SolvedPair se = solve_pair(rc, ca, cb);
        if (!se.feasible) return 2.0 * w_outer;
        return w_outer * (std::cos(se.phi_a[0] + se.phi_b[0]) +
                          std::cos(se.phi_a[1] + se.phi_b[1]));
    };

    PointEval out;
    if (rho - full > A || rho + full < B) return out; // cleanly outside

    if (full > 0.0) {
        // Core: the cell straddles the 1/rho singularity at rho = 0 (only
        // reachable when c_a = c_b).  Integrate 1/|r| exactly over the image
        // quadrilateral; 1/h(rho) is flat there.
        if (B < 0.02 * A && rho - full < 0.05 * A && corners) {
            // signed area of the image quadrilateral (shoelace)
            double area2 = 0.0;
            for (int e = 0; e < 4; ++e) {
                const Vec2& p = corners[e];
                const Vec2& q = corners[(e + 1) % 4];
                area2 += p.x * q.y - p.y * q.x;
            }
            (void)det_g;
            if (std::abs(area2) > 1e-14 * ca * cb) {
                double poly = 0.0;
                for (int e = 0; e < 4; ++e)
                    poly += inv_r_triangle(corners[e], corners[(e + 1) % 4]);
                const double h0 = std::sqrt(std::max(ca * ca - 0.25 * rho * rho, 1e-300));
                const double cell_mean = std::abs(poly) / (0.5 * std::abs(area2)) / h0;
                out.value = weight_sum(std::min(rho + 0.5 * full, 0.5 * A)) * cell_mean;
                return out;
            }
            // fold right on the core: rare; use a floored average instead
            const double jbar = averaged_pair_jacobian(rho, a1, a2, A, B, 0.05 * full);
            out.value = weight_sum(std::min(rho + 0.5 * full, 0.5 * A)) * jbar;
            out.clipped = std::abs(out.value);
            return out;
        }
        // Band width is a fixed fraction of the annulus: the sqrt-edge bias of
        // a raw midpoint rule decays too slowly for a band tied to the cell size.
        const double band = std::max(8.0 * full, 0.15 * (A - B));
        const bool near_edge = std::min(rho - B, A - rho) < band ||
                               (sol.feasible && rho * sol.h < kSinClip * ca * cb);
        if (near_edge || !sol.feasible) {
            const double jbar = averaged_pair_jacobian(rho, a1, a2, A, B, 0.0);
            if (jbar == 0.0) return out;
            const double rho_eval = std::clamp(rho, B + 1e-12 * A, A - 1e-12 * A);
            out.value = weight_sum(rho_eval) * jbar;
            return out;
        }
    }

    if (!sol.feasible) return out;
    const double sin_d = rho * sol.h / (ca * cb);
    if (sin_d < kSinClip) {
        out.clipped = 1.0 / kSinClip; // dropped an unbounded sample
        return out;
    }
    const double jac = 1.0 / (ca * cb * sin_d);
    if (spec.weight == Weight::R3) {
        for (int br = 0; br < 2; ++br)
            out.value += w_outer * std::cos(sol.phi_a[br] + sol.phi_b[br]) * jac;
    } else {
        out.value = 2.0 * w_outer * jac;
    }
    return out;
}

// Feasibility of the whole polygon (sides = radii and g).
bool polygon_infeasible(const ScatterSpec& spec) {
    double total = spec.g;
    double cmax = spec.g;
    for (double c : spec.radii) {
        total += c;
        cmax = std::max(cmax, c);
    }
    return cmax > total - cmax;
}

// Outer integration box; the full domain unless a threshold restriction is set.
struct OuterBox {
    std::vector<double> center;
    std::vector<double> half_width;
    double measure = 1.0;
};

OuterBox full_box(std::size_t d) {
    OuterBox b;
    b.center.assign(d, kPi);
    b.half_width.assign(d, kPi);
    b.measure = std::pow(kTwoPi, (double)d);
    return b;
}

// Exact support restriction near threshold (phi_dk = 0):
// c_j (1 -+ cos phi_j) <= eps bounds each angle around 0 (odd) or pi (even).
bool threshold_box(const ScatterSpec& spec, double eps, OuterBox* box) {
    if (std::abs(spec.phi_dk) > 1e-12) return false;
    const std::size_t d = spec.radii.size() - 2;
    box->center.resize(d);
    box->half_width.resize(d);
    box->measure = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double q = eps / spec.radii[j];
        if (q >= 0.3) return false; // restriction not worth it
        const double w = std::acos(1.0 - q) * (1.0 + 1e-9) + 1e-14;
        box->center[j] = (slot_sign(j) > 0.0) ? 0.0 : kPi;
        box->half_width[j] = w;
        box->measure *= 2.0 * w;
    }
    return true;
}

Estimate eval_2d_grid(const ScatterSpec& spec, const OuterBox& box, int grid,
                      std::uint64_t seed) {
    const std::size_t d = spec.radii.size() - 2; // == 2 here
    const double prefac = 1.0 / std::pow(kTwoPi, (double)(2 * spec.N - 1));
    const double ca = spec.radii[d], cb = spec.radii[d + 1];
    const double A = ca + cb, B = std::abs(ca - cb);
    const double tx = spec.g * std::cos(spec.phi_dk);
    const double ty = spec.g * std::sin(spec.phi_dk);

    auto residual = [&](double p0, double p1) {
        return Vec2{tx - spec.radii[0] * std::cos(p0) + spec.radii[1] * std::cos(p1),
                    ty - spec.radii[0] * std::sin(p0) + spec.radii[1] * std::sin(p1)};
    };

    auto run = [&](int G) {
        const double hx = 2.0 * box.half_width[0] / G;
        const double hy = 2.0 * box.half_width[1] / G;
        double acc = 0.0, comp = 0.0, clip = 0.0;
        for (int i = 0; i < G; ++i) {
            const double p0 = box.center[0] - box.half_width[0] + (i + 0.5) * hx;
            for (int j = 0; j < G; ++j) {
                const double p1 = box.center[1] - box.half_width[1] + (j + 0.5) * hy;
                const double phis[2] = {p0, p1};
                const Vec2 r = residual(p0, p1);
                const double rho = norm(r);
                // exact rho-gradients give the cell's half-spans per axis
                double a1, a2;
                if (rho > 1e-13) {
                    const double rx = r.x / rho, ry = r.y / rho;
                    a1 = 0.5 * hx *
                         std::abs(spec.radii[0] * (std::sin(p0) * rx - std::cos(p0) * ry));
                    a2 = 0.5 * hy *
                         std::abs(spec.radii[1] * (-std::sin(p1) * rx + std::cos(p1) * ry));
                } else {
                    a1 = 0.5 * hx * spec.radii[0];
                    a2 = 0.5 * hy * spec.radii[1];
                }
                a1 += 1e-15;
                a2 += 1e-15;

                Vec2 corner_buf[4];
                const Vec2* corners = nullptr;
                if (B < 0.02 * A && rho - (a1 + a2) < 0.05 * A) {
                    corner_buf[0] = residual(p0 - 0.5 * hx, p1 - 0.5 * hy);
                    corner_buf[1] = residual(p0 + 0.5 * hx, p1 - 0.5 * hy);
                    corner_buf[2] = residual(p0 + 0.5 * hx, p1 + 0.5 * hy);
                    corner_buf[3] = residual(p0 - 0.5 * hx, p1 + 0.5 * hy);
                    corners = corner_buf;
                }
                const PointEval pe = eval_outer_point(spec, phis, d, a1, a2, corners, 0.0);
                const double cell = pe.value * hx * hy;
                const double t = cell - comp;
                const double next = acc + t;
                comp = (next - acc) - t;
                acc = next;
                clip += pe.clipped * hx * hy;
            }
        }
        return std::pair<double, double>(acc * prefac, clip * prefac);
    };

    auto [v_full, clip_full] = run(grid);
    auto [v_half, clip_half] = run(std::max(grid / 2, 8));
    (void)clip_half;

    Estimate e;
    e.value = v_full;
    e.error_bound =
        1.5 * std::abs(v_full - v_half) + clip_full + 1e-14 * (1.0 + std::abs(v_full));
    e.intervals_used = (long)grid * grid;
    e.method = Method::AngularGrid;
    e.seed = seed;
    return e;
}

// Halton radical inverse.
double radical_inverse(std::uint64_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

Estimate eval_2d_qmc(const ScatterSpec& spec, const OuterBox& box, long samples,
                     std::uint64_t seed) {
    static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    const std::size_t d = spec.radii.size() - 2;
    if (d > 12) throw config_error("eval_2d_angular: too many outer angles for QMC bases");
    const double prefac = 1.0 / std::pow(kTwoPi, (double)(2 * spec.N - 1));

    const int replicas = 8;
    const long per = std::max<long>(samples / replicas, 64);
    std::vector<double> rep_vals(replicas, 0.0);
    double clip_total = 0.0;
    std::vector<double> phis(d), shift(d);

    for (int rep = 0; rep < replicas; ++rep) {
        CounterRng rng(seed, 1000 + rep);
        for (std::size_t j = 0; j < d; ++j) shift[j] = rng.next_double();
        double acc = 0.0, comp = 0.0, clip = 0.0;
        for (long i = 0; i < per; ++i) {
            const std::uint64_t idx = 64 + (std::uint64_t)i; // skip the early stripe
            for (std::size_t j = 0; j < d; ++j) {
                double u = radical_inverse(idx, primes[j]) + shift[j];
                u -= std::floor(u);
                phis[j] = box.center[j] + (2.0 * u - 1.0) * box.half_width[j];
            }
            const PointEval pe =
                eval_outer_point(spec, phis.data(), d, 0.0, 0.0, nullptr, 0.0);
            const double t = pe.value - comp;
            const double next = acc + t;
            comp = (next - acc) - t;
            acc = next;
            clip += pe.clipped;
        }
        rep_vals[rep] = acc / per * box.measure * prefac;
        clip_total += clip / per;
    }

    const double mean = std::accumulate(rep_vals.begin(), rep_vals.end(), 0.0) / replicas;
    double var = 0.0;
    for (double v : rep_vals) var += (v - mean) * (v - mean);
    var /= (replicas - 1.0);
    const double stderr_mean = std::sqrt(var / replicas);
    const double clip_frac = clip_total / replicas / (1.0 / kSinClip);

    Estimate e;
    e.value = mean;
    e.error_bound = 1.5 * stderr_mean + clip_frac * std::abs(mean) +
                    1e-14 * (1.0 + std::abs(mean));
    e.intervals_used = per * replicas;
    e.method = Method::AngularQmc;
    e.seed = seed;
    return e;
}

double fit_loglog(const std::vector<double>& eps, const std::vector<double>& f,
                  double* stderr_out) {
    const std::size_t n = eps.size();
    double sx = 0, sy = 0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(eps[i]);
        ys[i] = std::log(f[i]);
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - my - slope * (xs[i] - mx);
        ss += r * r;
    }
    if (stderr_out)
        *stderr_out = (n > 2) ? std::sqrt(ss / ((n - 2.0) * sxx)) : 0.0;
    return slope;
}

} // namespace

ScatterSpec::ScatterSpec(int dimension_, int N_, std::vector<double> radii_, double g_,
                         Weight weight_, double phi_dk_)
    : dimension(dimension_), N(N_), radii(std::move(radii_)), g(g_), weight(weight_),
      phi_dk(phi_dk_) {
    if (dimension != 2 && dimension != 3)
        throw domain_error("ScatterSpec: dimension must be 2 or 3");
    if (N < 1) throw domain_error("ScatterSpec: N >= 1");
    if (radii.size() != (std::size_t)(2 * N))
        throw domain_error("ScatterSpec: need exactly 2N radii");
    for (double r : radii)
        if (!(r > 0.0) || !std::isfinite(r))
            throw domain_error("ScatterSpec: radii must be positive and finite");
    if (!(g > 0.0) || !std::isfinite(g))
        throw domain_error("ScatterSpec: g must be positive and finite");
    if ((weight == Weight::R2 || weight == Weight::R3) && !(dimension == 2 && N == 2))
        throw domain_error("ScatterSpec: R2/R3 weights are defined for dimension 2, N = 2");
}

Estimate eval_2d_angular(const ScatterSpec& spec, const OracleBudget& budget) {
    if (spec.dimension != 2) throw domain_error("eval_2d_angular: dimension must be 2");
    if (budget.grid < 8 || budget.samples < 64)
        throw config_error("eval_2d_angular: inconsistent budget");

    Estimate zero;
    zero.method = (spec.N <= 2) ? Method::AngularGrid : Method::AngularQmc;
    zero.seed = budget.seed;
    zero.zero_consistent = true;
    if (polygon_infeasible(spec)) return zero; // exact 0, zero error

    if (spec.N == 1) {
        // no outer angles: the two delta constraints fix everything
        const double ca = spec.radii[0], cb = spec.radii[1];
        const double A = ca + cb, B = std::abs(ca - cb);
        Estimate e;
        e.method = Method::ClosedForm;
        e.seed = budget.seed;
        e.intervals_used = 1;
        if (spec.g > A || spec.g < B) {
            e.zero_consistent = true;
            return e;
        }
        const double disc = (A * A - spec.g * spec.g) * (spec.g * spec.g - B * B);
        if (disc <= 0.0) {
            e.divergent = true; // tangency: the rate diverges at threshold
            e.value = std::numeric_limits<double>::infinity();
            e.error_bound = std::numeric_limits<double>::infinity();
            return e;
        }
        e.value = 4.0 / (kTwoPi * std::sqrt(disc)); // = 1/(2 pi * triangle area)
        e.error_bound = 4e-16 * e.value;
        return e;
    }

    const OuterBox box = full_box(spec.radii.size() - 2);
    if (spec.N == 2) return eval_2d_grid(spec, box, budget.grid, budget.seed);
    return eval_2d_qmc(spec, box, budget.samples, budget.seed);
}

double trig_expansion_3d(const std::vector<double>& c, bool* conditional_note) {
    const std::size_t K = c.size();
    if (K < 3 || K > 12)
        throw domain_error("trig_expansion_3d: need between 3 and 12 coefficients");
    double prod_c = 1.0, sum_c = 0.0;
    for (double v : c) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw domain_error("trig_expansion_3d: coefficients must be positive");
        prod_c *= v;
        sum_c += v;
    }
    if (conditional_note) *conditional_note = false;

    const int p = (int)K - 2; // kernel power 1/r^p
    double fact = 1.0;
    for (int i = 2; i <= p - 1; ++i) fact *= i;
    const bool sin_type = (K % 2 == 1); // matches p odd
    // sign of the product-to-sum prefactor
    const double s_pref = ((sin_type ? (K - 1) / 2 : K / 2) % 2 == 0) ? 1.0 : -1.0;
    const double i_sign = (((p - (sin_type ? 1 : 0)) / 2) % 2 == 0) ? 1.0 : -1.0;
    const double moment_pref = i_sign * kPi / (2.0 * fact);

    const double wtol = 1e-12 * sum_c;
    double acc = 0.0, comp = 0.0;
    const std::uint64_t masks = 1ull << (K - 1);
    for (std::uint64_t m = 0; m < masks; ++m) {
        double omega = c[0];
        double prod_s = 1.0;
        for (std::size_t i = 1; i < K; ++i) {
            if (m & (1ull << (i - 1))) {
                omega -= c[i];
                prod_s = -prod_s;
            } else {
                omega += c[i];
            }
        }
        double term;
        if (std::abs(omega) <= wtol) {
            if (conditional_note) *conditional_note = true;
            term = 0.0; // principal value: sgn(0) = 0, |0|^(p-1) = 0
        } else if (sin_type) {
            term = prod_s * moment_pref * std::copysign(std::pow(std::abs(omega), p - 1), omega);
        } else {
            term = prod_s * moment_pref * std::pow(std::abs(omega), p - 1);
        }
        const double t = term - comp;
        const double next = acc + t;
        comp = (next - acc) - t;
        acc = next;
    }
    return s_pref / std::pow(2.0, (double)(K - 1)) * acc / prod_c;
}

Estimate eval_3d_angular(const ScatterSpec& spec, const OracleBudget& budget) {
    if (spec.dimension != 3) throw domain_error("eval_3d_angular: dimension must be 3");
    if (spec.weight != Weight::Unit && spec.weight != Weight::R1)
        throw domain_error("eval_3d_angular: only the unit weight is defined in 3D");
    if (budget.mc_samples < 1024)
        throw config_error("eval_3d_angular: inconsistent budget");

    std::vector<double> coeffs = spec.radii;
    coeffs.push_back(spec.g);
    bool note = false;
    const double exact = trig_expansion_3d(coeffs, &note);

    Estimate e;
    e.value = exact;
    e.error_bound = 1e-13 * (1.0 + std::abs(exact));
    e.method = Method::TrigExpansion;
    e.seed = budget.seed;
    e.intervals_used = 1L << (coeffs.size() - 1);
    e.zero_consistent = (exact == 0.0);
    e.degraded = note;

    if (budget.run_mc_cross_check) {
        // Gaussian-smeared momentum deltas, O(sigma^2) bias removed by
        // two-point Richardson over halved widths.
        const double sigmas[3] = {0.08, 0.04, 0.02};
        const int nbatch = 16;
        const long per = std::max<long>(budget.mc_samples / nbatch, 256);
        double mean_s[3] = {0, 0, 0}, var_s[3] = {0, 0, 0};
        std::vector<std::array<double, 3>> batch(nbatch, {0, 0, 0});
        CounterRng rng(budget.seed, 31337);
        for (int b = 0; b < nbatch; ++b) {
            double acc[3] = {0, 0, 0};
            for (long i = 0; i < per; ++i) {
                double vx = -spec.g, vy = 0.0, vz = 0.0; // target along x
                for (std::size_t n = 0; n < spec.radii.size(); ++n) {
                    const double u = 2.0 * rng.next_double() - 1.0;
                    const double ph = kTwoPi * rng.next_double();
                    const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
                    const double s = slot_sign(n) * spec.radii[n];
                    vx += s * st * std::cos(ph);
                    vy += s * st * std::sin(ph);
                    vz += s * u;
                }
                const double q2 = vx * vx + vy * vy + vz * vz;
                for (int k = 0; k < 3; ++k) {
                    const double s2 = sigmas[k] * sigmas[k];
                    acc[k] += std::exp(-q2 / (2.0 * s2)) /
                              std::pow(kTwoPi * s2, 1.5);
                }
            }
            for (int k = 0; k < 3; ++k) batch[b][k] = acc[k] / per;
        }
        for (int k = 0; k < 3; ++k) {
            for (int b = 0; b < nbatch; ++b) mean_s[k] += batch[b][k];
            mean_s[k] /= nbatch;
            for (int b = 0; b < nbatch; ++b)
                var_s[k] += (batch[b][k] - mean_s[k]) * (batch[b][k] - mean_s[k]);
            var_s[k] = var_s[k] / (nbatch - 1.0) / nbatch;
        }
        const double scale = 2.0 * kPi * kPi * kPi;
        const double f1 = scale * (4.0 * mean_s[1] - mean_s[0]) / 3.0;
        const double f2 = scale * (4.0 * mean_s[2] - mean_s[1]) / 3.0;
        const double se = scale * std::sqrt((16.0 * var_s[2] + var_s[1]) / 9.0);
        e.cross_check = f2;
        e.cross_check_error = se + std::abs(f2 - f1);
    }
    return e;
}

ThresholdFit threshold_scan(const ScatterSpec& base, const std::vector<double>& eps_grid,
                            const OracleBudget& budget) {
    if (eps_grid.size() < 5)
        throw config_error("threshold_scan: need at least 5 epsilon points");
    double sum_r = 0.0;
    for (double r : base.radii) sum_r += r;

    std::vector<double> eps_ok, f_ok;
    for (double eps : eps_grid) {
        if (!(eps > 0.0) || eps >= sum_r)
            throw config_error("threshold_scan: epsilon must lie in (0, sum radii)");
        ScatterSpec s = base;
        s.g = sum_r - eps;
        double f;
        if (base.dimension == 3) {
            std::vector<double> coeffs = s.radii;
            coeffs.push_back(s.g);
            f = trig_expansion_3d(coeffs);
        } else if (base.N == 1) {
            f = eval_2d_angular(s, budget).value;
        } else {
            OuterBox box;
            if (threshold_box(s, eps, &box)) {
                f = (base.N == 2) ? eval_2d_grid(s, box, budget.grid, budget.seed).value
                                  : eval_2d_qmc(s, box, budget.samples, budget.seed).value;
            } else {
                f = eval_2d_angular(s, budget).value;
            }
        }
        if (f > 0.0) {
            eps_ok.push_back(eps);
            f_ok.push_back(f);
        }
    }
    if (eps_ok.size() < 5)
        throw config_error("threshold_scan: window shrank below 5 usable points");

    ThresholdFit fit;
    fit.exponent = fit_loglog(eps_ok, f_ok, &fit.exponent_stderr);
    fit.epsilon_lo = *std::min_element(eps_ok.begin(), eps_ok.end());
    fit.epsilon_hi = *std::max_element(eps_ok.begin(), eps_ok.end());
    fit.points = (int)eps_ok.size();
    return fit;
}

} // namespace bpint::delta_oracle
