#pragma once

// Vegas integration of the joint expiration-time density over the union of
// lifted goal polytopes, and the end-to-end forward pipeline.

#include "racreach/model_io.hpp"
#include "racreach/reach.hpp"
#include "racreach/stochastics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace racreach {

struct VegasConfig {
    std::size_t samples = 1'000'000;
    std::size_t iterations = 10;
    std::size_t bins = 50;
    double alpha = 1.5;
    /// Leading iterations that only train the grid.
    std::size_t warmup = 2;
    std::uint64_t seed = 0;
    /// 0 picks the hardware concurrency. Never changes the result.
    std::size_t workers = 0;
};

struct IterationEstimate {
    double value = 0.0;
    double sigma = 0.0;
    std::size_t samples = 0;
    std::size_t hits = 0;
};

struct IntegrationResult {
    double p_max = 0.0;
    double e_stat = 0.0;
    double e_inf = 0.0;
    /// Share of all samples that landed in the region.
    double hit_fraction = 0.0;
    std::vector<IterationEstimate> iterations;
};

/// Region members converted to double, each bound rounded up by one ulp.
class SampleRegion {
public:
    SampleRegion() = default;
    SampleRegion(std::size_t dim, const std::vector<HPolytope>& members);

    std::size_t dim() const { return dim_; }
    bool empty() const { return members_.empty(); }
    std::size_t size() const { return members_.size(); }
    /// Membership in any member.
    bool contains(const double* x) const;

private:
    struct Member {
        std::vector<double> coeffs;  // row-major, dim_ per row
        std::vector<double> bounds;
    };
    std::size_t dim_ = 0;
    std::vector<Member> members_;
};

/// Estimates the integral of the joint density over region ∩ box. Throws
/// std::invalid_argument for inconsistent dimensions or configurations.
IntegrationResult vegas_integrate(const SampleRegion& region, const std::vector<DistributionSpec>& dists,
                                  const std::vector<BoundPair>& box, const VegasConfig& cfg);

/// 1 - prod over lifted dimensions of P(X <= t_int).
double truncation_error(const std::vector<DistributionSpec>& dists, const std::vector<bool>& lifted, double t_int);

struct PipelineOptions {
    Scalar t_max = 0;
    std::size_t jmp = 0;
    double t_int = 100.0;
    EliminationMode mode = EliminationMode::fm_plus;
    bool adapt_bounds = true;
    double tau = default_tau;
    /// Integrate uncoupled dimensions in closed form instead of sampling them.
    bool marginalize = true;
    VegasConfig vegas;
};

struct DimensionReport {
    std::string name;
    DistributionSpec distribution;
    BoundPair unadapted;
    BoundPair adapted;
    /// Integration interval after clipping to the region's bounding box.
    BoundPair integrated;
    /// Integrated in closed form because no member couples it.
    bool marginalized = false;
    bool lifted = false;
};

struct PhaseTimes {
    double unroll = 0.0;
    double reach = 0.0;
    double project = 0.0;
    double integrate = 0.0;
};

struct PipelineReport {
    IntegrationResult result;
    std::size_t unrolled_locations = 0;
    std::size_t nodes = 0;
    std::size_t trees = 0;
    /// (tree, node) of every goal node with a nonempty lifted region.
    std::vector<std::pair<std::size_t, std::size_t>> goal_nodes;
    EliminationStats stats;
    std::vector<DimensionReport> dimensions;
    std::vector<std::string> warnings;
    PhaseTimes seconds;
};

/// Bounds only: [0, t_int] and the tightened pair per clock copy.
std::vector<DimensionReport> integration_bounds(const UnrolledRac& u, double t_int, bool adapt, double tau = default_tau);

/// unroll -> reach trees from every initial location -> goal nodes ->
/// lifted region -> bounds -> Vegas -> truncation error. Throws ModelError
/// for invalid models and AnalysisError for unusable settings.
PipelineReport estimate_pipeline(const Rac& model, const GoalSpec& goal, const PipelineOptions& options);

}  // namespace racreach
