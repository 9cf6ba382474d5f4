#include "racreach/stochastics.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

namespace racreach {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

constexpr double inv_sqrt2 = 0.70710678118654752440;

double phi(double z) { return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

/// P(a <= Z <= b) for standard normal Z, without cancellation in the tails.
double normal_mass(double a, double b) {
    if (!(a < b)) return 0.0;
    if (a >= 0.0) return 0.5 * (std::erfc(a * inv_sqrt2) - std::erfc(b * inv_sqrt2));
    if (b <= 0.0) return 0.5 * (std::erfc(-b * inv_sqrt2) - std::erfc(-a * inv_sqrt2));
    return 0.5 * (std::erf(b * inv_sqrt2) - std::erf(a * inv_sqrt2));
}

double folded_mass(const FoldedNormal& d, double lo, double hi) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto z = [&](double x) { return std::isinf(x) ? (x > 0 ? inf : -inf) : (x - d.mu) / d.sigma; };
    const auto zn = [&](double x) { return std::isinf(x) ? (x > 0 ? -inf : inf) : (-x - d.mu) / d.sigma; };
    // |Y| in [lo, hi]  <=>  Y in [lo, hi] or Y in [-hi, -lo]
    return normal_mass(z(lo), z(hi)) + normal_mass(zn(hi), zn(lo));
}

/// Largest x in [a, b] with g(x) <= tau, for g nondecreasing and g(a) <= tau.
template <class G>
double find_larger(G g, double a, double b, double tau) {
    if (g(b) <= tau) return b;
    double lo = a, hi = b;
    for (int it = 0; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (g(mid) <= tau ? lo : hi) = mid;
    }
    return lo;
}

/// Smallest x in [a, b] with h(x) <= tau, for h nonincreasing and h(b) <= tau.
template <class H>
double find_smaller(H h, double a, double b, double tau) {
    if (h(a) <= tau) return a;
    double lo = a, hi = b;
    for (int it = 0; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (h(mid) <= tau ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

void check_distribution(const DistributionSpec& d) {
    std::visit(overloaded{
                   [](const FoldedNormal& f) {
                       if (!(f.mu >= 0.0) || !std::isfinite(f.mu)) throw std::invalid_argument("folded normal needs mu >= 0");
                       if (!(f.sigma > 0.0) || !std::isfinite(f.sigma))
                           throw std::invalid_argument("folded normal needs sigma > 0");
                   },
                   [](const Exponential& e) {
                       if (!(e.lambda > 0.0) || !std::isfinite(e.lambda))
                           throw std::invalid_argument("exponential needs lambda > 0");
                   },
                   [](const Uniform& u) {
                       if (!(u.a >= 0.0) || !std::isfinite(u.b) || !(u.b > u.a))
                           throw std::invalid_argument("uniform needs 0 <= a < b");
                   },
               },
               d);
}

std::string describe(const DistributionSpec& d) {
    std::ostringstream out;
    out.precision(6);
    std::visit(overloaded{
                   [&](const FoldedNormal& f) { out << "FoldedNormal(" << f.mu << ", " << f.sigma << ")"; },
                   [&](const Exponential& e) { out << "Exp(" << e.lambda << ")"; },
                   [&](const Uniform& u) { out << "Uniform(" << u.a << ", " << u.b << ")"; },
               },
               d);
    return out.str();
}

double pdf(const DistributionSpec& d, double x) {
    if (x < 0.0) return 0.0;
    return std::visit(overloaded{
                          [&](const FoldedNormal& f) {
                              return (phi((x - f.mu) / f.sigma) + phi((x + f.mu) / f.sigma)) / f.sigma;
                          },
                          [&](const Exponential& e) { return e.lambda * std::exp(-e.lambda * x); },
                          [&](const Uniform& u) { return x >= u.a && x <= u.b ? 1.0 / (u.b - u.a) : 0.0; },
                      },
                      d);
}

double interval_mass(const DistributionSpec& d, double lo, double hi) {
    lo = std::max(lo, 0.0);
    if (!(lo < hi)) return 0.0;
    return std::visit(overloaded{
                          [&](const FoldedNormal& f) { return folded_mass(f, lo, hi); },
                          [&](const Exponential& e) {
                              if (std::isinf(hi)) return std::exp(-e.lambda * lo);
                              return -std::exp(-e.lambda * lo) * std::expm1(-e.lambda * (hi - lo));
                          },
                          [&](const Uniform& u) {
                              const double a = std::max(lo, u.a), b = std::min(hi, u.b);
                              return a < b ? (b - a) / (u.b - u.a) : 0.0;
                          },
                      },
                      d);
}

double center(const DistributionSpec& d) {
    return std::visit(overloaded{
                          [](const FoldedNormal& f) { return f.mu; },
                          [](const Exponential& e) { return 1.0 / e.lambda; },
                          [](const Uniform& u) { return 0.5 * (u.a + u.b); },
                      },
                      d);
}

BoundPair tighten_bounds(const DistributionSpec& d, double t_int, double tau) {
    if (!(tau > 0.0) || !(tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
    if (!(t_int > 0.0) || !std::isfinite(t_int)) throw std::invalid_argument("t_int must be positive and finite");
    check_distribution(d);

    const auto below = [&](double x) { return interval_mass(d, 0.0, x); };
    const auto above = [&](double x) { return interval_mass(d, x, t_int); };
    const double mu = std::min(center(d), t_int);

    double lo = 0.0, hi = t_int;
    if (const auto* f = std::get_if<FoldedNormal>(&d)) {
        if (2.0 * f->mu - t_int < 0.0) {
            hi = 2.0 * f->mu;
            if (above(hi) > tau) hi = find_smaller(above, hi, t_int, tau);
        } else {
            lo = 2.0 * f->mu - t_int;
            if (below(lo) > tau) lo = find_larger(below, 0.0, lo, tau);
        }
    } else if (const auto* e = std::get_if<Exponential>(&d)) {
        hi = std::min(t_int, -std::log(tau) / e->lambda);
        while (hi < t_int && above(hi) > tau) hi = std::nextafter(hi, t_int);
    } else if (const auto* u = std::get_if<Uniform>(&d)) {
        lo = std::max(0.0, u->a);
        hi = std::min(u->b, t_int);
    }

    if (lo < hi && !std::holds_alternative<Uniform>(d)) {
        lo = find_larger(below, lo, std::max(lo, std::min(mu, hi)), tau);
        hi = find_smaller(above, std::min(hi, std::max(mu, lo)), hi, tau);
    }
    if (!(lo < hi)) {
        std::ostringstream msg;
        msg << describe(d) << " has no mass to integrate inside [0, " << t_int << "]";
        throw DegenerateBoundsError(msg.str());
    }
    return {lo, hi};
}

double joint_density(std::span<const DistributionSpec> dists, std::span<const double> s) {
    if (dists.size() != s.size()) throw std::invalid_argument("sample length does not match distribution count");
    double g = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) g *= pdf(dists[i], s[i]);
    return g;
}

}  // namespace racreach
