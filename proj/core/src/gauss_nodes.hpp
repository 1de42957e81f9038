#ifndef BPINT_GAUSS_NODES_HPP
#define BPINT_GAUSS_NODES_HPP

#include <vector>

namespace bpint::detail {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on P_n and cached.  Thread-safe.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussRule& gauss_legendre(int n);

// Integrate f over [a,b] with the n-point rule.
template <typename F>
double gauss_integrate(F&& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double term = r.w[i] * f(mid + half * r.x[i]) - comp;
        const double next = acc + term;
        comp = (next - acc) - term;
        acc = next;
    }
    return acc * half;
}

} // namespace bpint::detail

#endif
