#include "bpint/constraints.hpp"
#include "bpint/errors.hpp"

#include <cmath>

namespace bpint {

IntegralSpec::IntegralSpec(double alpha_, std::vector<Factor> factors_)
    : alpha(alpha_), factors(std::move(factors_)) {
    if (!std::isfinite(alpha)) throw domain_error("IntegralSpec: alpha must be finite");
    if (factors.size() < 2) throw domain_error("IntegralSpec: need at least two factors");
    for (const Factor& f : factors) {
        if (!std::isfinite(f.nu)) throw domain_error("IntegralSpec: order must be finite");
        if (!(f.c > 0.0) || !std::isfinite(f.c))
            throw domain_error("IntegralSpec: coefficients must be positive and finite");
    }
    max_index_ = 0;
    for (std::size_t i = 1; i < factors.size(); ++i)
        if (factors[i].c > factors[max_index_].c) max_index_ = i;
    max_unique_ = true;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i == max_index_) continue;
        if (std::abs(factors[i].c - factors[max_index_].c) <=
            max_tie_tol * factors[max_index_].c)
            max_unique_ = false;
    }
}

double IntegralSpec::sum_c() const {
    double s = 0.0;
    for (const Factor& f : factors) s += f.c;
    return s;
}

double IntegralSpec::sum_c_others() const { return sum_c() - factors[max_index_].c; }

double IntegralSpec::nu_sum() const {
    double s = 0.0;
    for (const Factor& f : factors) s += f.nu;
    return s;
}

double IntegralSpec::mu() const { return alpha + nu_sum(); }

bool check_convergence(const IntegralSpec& spec) {
    const double lo = -spec.nu_sum();
    const double hi = 0.5 * spec.M() + 1.0;
    return lo < spec.alpha && spec.alpha < hi;
}

Polygonal check_polygonal(const IntegralSpec& spec, double tol) {
    const double cmax = spec.c_max();
    const double others = spec.sum_c_others();
    if (cmax < others - tol) return Polygonal::Satisfied;
    if (cmax > others + tol) return Polygonal::Violated;
    return Polygonal::Boundary;
}

std::optional<int> check_charge_neutrality(const IntegralSpec& spec, double tol) {
    if (!spec.max_unique())
        throw indeterminate_max_error(
            "check_charge_neutrality: maximum coefficient is not unique");
    const double nu_max = spec.factors[spec.max_index()].nu;
    const double nu_others = spec.nu_sum() - nu_max;
    // nu_max = nu_others + alpha - 2m  =>  m = (nu_others + alpha - nu_max)/2
    const double m_real = 0.5 * (nu_others + spec.alpha - nu_max);
    const double m_round = std::round(m_real);
    if (m_round < 0.5) return std::nullopt;                 // m must be >= 1
    if (std::abs(m_real - m_round) > 0.5 * tol) return std::nullopt;
    return static_cast<int>(m_round);
}

ConstraintReport predict_vanishing(const IntegralSpec& spec) {
    ConstraintReport r;
    r.convergent = check_convergence(spec);
    r.polygonal = check_polygonal(spec);
    r.max_unique = spec.max_unique();
    r.charge_neutral_m = check_charge_neutrality(spec); // throws on ties
    r.predicted_zero = r.convergent && r.polygonal == Polygonal::Violated &&
                       r.charge_neutral_m.has_value() && r.max_unique;
    return r;
}

const char* polygonal_name(Polygonal p) {
    switch (p) {
    case Polygonal::Satisfied: return "satisfied";
    case Polygonal::Violated: return "violated";
    case Polygonal::Boundary: return "boundary";
    }
    return "?";
}

} // namespace bpint
