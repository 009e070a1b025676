#pragma once
// Closed-form feasibility limits on lambda_0 as pure functions of (d, K, m),
// plus the cubic root that sharpens the d=3, K=5 case.

#include <cmath>
#include <cstddef>
#include <optional>

#include "ddc/errors.hpp"

namespace ddc {

/// Necessary bound lambda_0 <= d/K from counting message states.
inline double wcsg_bound(std::size_t d, std::size_t K) {
    if (d < 2) throw DomainError("wcsg_bound: need d >= 2");
    if (K < d || K > d * d) throw DomainError("wcsg_bound: K must lie in [d, d^2]");
    return static_cast<double>(d) / static_cast<double>(K);
}

/// Sharper bound for K = d+1 families: lambda_0 <= (1 + sqrt((d-2)/(d+2)))/2.
/// Strictly below d/(d+1) for d > 2.
inline double dp1_bound(std::size_t d) {
    if (d < 2) throw DomainError("dp1_bound: need d >= 2");
    const double ratio = static_cast<double>(d - 2) / static_cast<double>(d + 2);
    return 0.5 * (1.0 + std::sqrt(ratio));
}

/// Bound lambda_0 <= (K-m)/(2K-m-d) when the family pins m distinct cyclic
/// shift powers. Never below 1/2, and no stricter than d/K once K > 2d.
inline double shift_power_bound(std::size_t d, std::size_t K, std::size_t m) {
    if (d < 2) throw DomainError("shift_power_bound: need d >= 2");
    if (m < 1 || m > d) throw DomainError("shift_power_bound: m must lie in [1, d]");
    if (K < d + 1 || K > d * d) throw DomainError("shift_power_bound: K must lie in [d+1, d^2]");
    return static_cast<double>(K - m) / static_cast<double>(2 * K - m - d);
}

struct SpecialRoot {
    double eta_star;
    double lambda0_star;
};

/// Root of f(eta) = 2(1-eta) - eta^3/(1-eta^2) in (0.6, 1), by bisection;
/// lambda0_star = 1/(1+eta_star). Limits d=3, K=5 families with lambda_2 = 0.
inline SpecialRoot d3_special_root() {
    const auto f = [](double eta) {
        return 2.0 * (1.0 - eta) - eta * eta * eta / (1.0 - eta * eta);
    };
    double lo = 0.6;   // f > 0 here
    double hi = 0.999; // f < 0 here
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= 1e-12) break;
        (fm > 0.0 ? lo : hi) = mid;
    }
    return {mid, 1.0 / (1.0 + mid)};
}

struct ShiftPowerValue {
    double value;
    std::size_t m;
    bool non_binding; // weaker than d/K once K > 2d
};

struct BoundReport {
    std::size_t d;
    std::size_t K;
    double wcsg;
    std::optional<double> dp1;                  // present iff K = d+1
    std::optional<ShiftPowerValue> shift_power; // present iff m was pinned
    double applicable_min;
};

/// All bounds applicable to (d, K), optionally with m pinned shift powers;
/// applicable_min skips a non-binding shift-power value.
inline BoundReport bound_report(std::size_t d, std::size_t K,
                                std::optional<std::size_t> m = std::nullopt) {
    BoundReport r{d, K, wcsg_bound(d, K), std::nullopt, std::nullopt, 0.0};
    r.applicable_min = r.wcsg;
    if (K == d + 1) {
        r.dp1 = dp1_bound(d);
        r.applicable_min = std::min(r.applicable_min, *r.dp1);
    }
    if (m.has_value()) {
        const double v = shift_power_bound(d, K, *m);
        const bool non_binding = K > 2 * d;
        r.shift_power = ShiftPowerValue{v, *m, non_binding};
        if (!non_binding) r.applicable_min = std::min(r.applicable_min, v);
    }
    return r;
}

}  // namespace ddc
