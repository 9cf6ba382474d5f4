#pragma once

// Expiration-time distributions of random clocks: densities, interval
// masses and tightening of the per-dimension integration bounds.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace racreach {

/// |Y| for Y ~ N(mu, sigma^2).
struct FoldedNormal {
    double mu = 0.0;
    double sigma = 1.0;
};

struct Exponential {
    double lambda = 1.0;
};

struct Uniform {
    double a = 0.0;
    double b = 1.0;
};

using DistributionSpec = std::variant<FoldedNormal, Exponential, Uniform>;

class DegenerateBoundsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// 2^-54, the unit roundoff of IEEE double.
inline const double default_tau = std::ldexp(1.0, -54);

/// Throws std::invalid_argument on out-of-range parameters.
void check_distribution(const DistributionSpec& d);

std::string describe(const DistributionSpec& d);

/// Density on [0, inf); zero for negative x.
double pdf(const DistributionSpec& d, double x);

/// P(lo <= X <= hi) for 0 <= lo <= hi; hi may be +inf.
double interval_mass(const DistributionSpec& d, double lo, double hi);

/// Mean of the distribution (the target both bounds move toward).
double center(const DistributionSpec& d);

struct BoundPair {
    double lo = 0.0;
    double hi = 0.0;
};

/// Narrows [0, t_int] so that each discarded side carries mass <= tau.
/// Throws std::invalid_argument for tau outside (0, 1) or t_int <= 0, and
/// DegenerateBoundsError when the narrowed interval is empty.
BoundPair tighten_bounds(const DistributionSpec& d, double t_int, double tau = default_tau);

/// Product of the per-dimension densities.
double joint_density(std::span<const DistributionSpec> dists, std::span<const double> s);

}  // namespace racreach
