#ifndef BPINT_ESTIMATE_HPP
#define BPINT_ESTIMATE_HPP

#include <cstdint>
#include <limits>
#include <string>

namespace bpint {

enum class Method {
    PartitionExtrapolation, // interval splitting + sequence acceleration
    Regularized,            // exp(-eta*rho) damping with eta -> 0 extrapolation
    ClosedForm,             // analytic expression, machine precision
    LauricellaSeries,       // truncated hypergeometric series
    AngularGrid,            // deterministic product grid over free angles
    AngularQmc,             // quasi-Monte-Carlo over free angles
    TrigExpansion,          // exact product-to-sum expansion
    LocalModel,             // local asymptote near a flagged singularity
};

inline const char* method_name(Method m) {
    switch (m) {
    case Method::PartitionExtrapolation: return "partition-extrapolation";
    case Method::Regularized: return "regularized";
    case Method::ClosedForm: return "closed-form";
    case Method::LauricellaSeries: return "lauricella-series";
    case Method::AngularGrid: return "angular-grid";
    case Method::AngularQmc: return "angular-qmc";
    case Method::TrigExpansion: return "trig-expansion";
    case Method::LocalModel: return "local-model";
    }
    return "?";
}

// A numerical value with an error bound and method metadata.
struct Estimate {
    double value = 0.0;
    double error_bound = 0.0;
    long intervals_used = 1; // cells, grid points, samples or series terms
    Method method = Method::PartitionExtrapolation;
    std::uint64_t seed = 0;

    bool degraded = false;        // budget exhausted or acceleration stalled
    bool divergent = false;       // request sits on a genuine divergence
    bool zero_consistent = false; // |value| within the exact-zero tolerance

    // Optional second-method agreement (e.g. Monte-Carlo vs exact expansion).
    double cross_check = std::numeric_limits<double>::quiet_NaN();
    double cross_check_error = std::numeric_limits<double>::quiet_NaN();

    bool has_cross_check() const { return cross_check == cross_check; }
};

} // namespace bpint

#endif
