#include "racreach/integrate.hpp"

#include "racreach/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

namespace racreach {

namespace {

constexpr std::size_t chunk_size = 4096;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform in [0, 1), a pure function of its key.
double uniform01(std::uint64_t seed, std::uint64_t iteration, std::uint64_t index, std::uint64_t dim) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ iteration);
    h = splitmix(h ^ index);
    h = splitmix(h ^ dim);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double round_up(const Scalar& v) {
    const double d = to_double(v);
    return Scalar(d) >= v ? d : std::nextafter(d, HUGE_VAL);
}

double round_down(const Scalar& v) {
    const double d = to_double(v);
    return Scalar(d) <= v ? d : std::nextafter(d, -HUGE_VAL);
}

struct Grid {
    std::vector<double> edges;  // bins + 1

    double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
};

struct ChunkSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t hits = 0;
    std::vector<double> bin_weight;  // dim * bins
};

void refine(Grid& g, std::vector<double> w, double alpha) {
    const std::size_t k = w.size();
    if (k < 2) return;
    std::vector<double> s(k);
    s[0] = 0.5 * (w[0] + w[1]);
    s[k - 1] = 0.5 * (w[k - 2] + w[k - 1]);
    for (std::size_t b = 1; b + 1 < k; ++b) s[b] = (w[b - 1] + w[b] + w[b + 1]) / 3.0;
    double total = 0.0;
    for (double x : s) total += x;
    if (!(total > 0.0) || !std::isfinite(total)) return;

    std::vector<double> r(k, 0.0);
    double rsum = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
        if (s[b] > 0.0) {
            const double q = s[b] / total;
            r[b] = q < 1.0 ? std::pow((q - 1.0) / std::log(q), alpha) : 1.0;
        }
        rsum += r[b];
    }
    // bins without observed weight keep a sliver so no part of the box
    // becomes unreachable
    const double floor = 1e-3 * rsum / static_cast<double>(k);
    rsum = 0.0;
    for (double& x : r) {
        x = std::max(x, floor);
        rsum += x;
    }

    const double per_bin = rsum / static_cast<double>(k);
    std::vector<double> next(k + 1);
    next[0] = g.edges[0];
    next[k] = g.edges[k];
    std::size_t i = 1;
    double acc = 0.0, x_hi = g.edges[0];
    for (std::size_t b = 0; b < k && i < k; ++b) {
        acc += r[b];
        const double x_lo = x_hi;
        x_hi = g.edges[b + 1];
        while (acc > per_bin && i < k) {
            acc -= per_bin;
            next[i++] = x_hi - (x_hi - x_lo) * acc / r[b];
        }
    }
    for (; i < k; ++i) next[i] = g.edges[k];
    for (std::size_t b = 1; b <= k; ++b) next[b] = std::max(next[b], next[b - 1]);
    g.edges = std::move(next);
}

using WallClock = std::chrono::steady_clock;

double since(WallClock::time_point t0) { return std::chrono::duration<double>(WallClock::now() - t0).count(); }

/// Interval of coordinate k in p when only single-coordinate rows mention
/// it; nullopt when some row couples k with another coordinate.
std::optional<Interval> separable_interval(const HPolytope& p, std::size_t k) {
    Interval out;
    for (const auto& row : p.constraints()) {
        if (sgn(row.coeffs[k]) == 0) continue;
        for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
            if (j != k && sgn(row.coeffs[j]) != 0) return std::nullopt;
        }
        const Scalar v = row.bound / row.coeffs[k];
        if (sgn(row.coeffs[k]) > 0) {
            if (!out.hi || v < *out.hi) out.hi = v;
        } else {
            if (!out.lo || v > *out.lo) out.lo = v;
        }
    }
    return out;
}

bool same(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

}  // namespace

SampleRegion::SampleRegion(std::size_t dim, const std::vector<HPolytope>& members) : dim_(dim) {
    for (const auto& p : members) {
        if (p.dim() != dim) throw DimensionError("region member does not match the sample dimension");
        if (p.is_trivially_empty()) continue;
        Member m;
        for (const auto& row : p.constraints()) {
            for (const auto& c : row.coeffs) m.coeffs.push_back(to_double(c));
            m.bounds.push_back(std::nextafter(to_double(row.bound), HUGE_VAL));
        }
        members_.push_back(std::move(m));
    }
}

bool SampleRegion::contains(const double* x) const {
    for (const auto& m : members_) {
        bool in = true;
        for (std::size_t r = 0; r < m.bounds.size() && in; ++r) {
            const double* a = m.coeffs.data() + r * dim_;
            double s = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) s += a[k] * x[k];
            in = s <= m.bounds[r];
        }
        if (in) return true;
    }
    return false;
}

IntegrationResult vegas_integrate(const SampleRegion& region, const std::vector<DistributionSpec>& dists,
                                  const std::vector<BoundPair>& box, const VegasConfig& cfg) {
    const std::size_t d = region.dim();
    if (dists.size() != d || box.size() != d) throw std::invalid_argument("region, distributions and box differ in dimension");
    if (cfg.bins < 2) throw std::invalid_argument("Vegas needs at least 2 bins");
    if (cfg.iterations == 0 || cfg.warmup >= cfg.iterations) {
        throw std::invalid_argument("Vegas needs more iterations than warm-up iterations");
    }
    if (cfg.samples < cfg.iterations * cfg.bins) throw std::invalid_argument("Vegas needs samples >= iterations * bins");
    for (const auto& b : box) {
        if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
            throw std::invalid_argument("integration box must be finite");
        }
    }

    IntegrationResult out;
    if (region.empty()) return out;
    if (d == 0) {
        out.p_max = 1.0;
        out.hit_fraction = 1.0;
        return out;
    }
    for (const auto& b : box) {
        if (!(b.lo < b.hi)) return out;  // measure zero
    }

    const std::size_t k = cfg.bins;
    std::vector<Grid> grids(d);
    for (std::size_t i = 0; i < d; ++i) {
        grids[i].edges.resize(k + 1);
        for (std::size_t b = 0; b <= k; ++b) {
            grids[i].edges[b] = box[i].lo + (box[i].hi - box[i].lo) * static_cast<double>(b) / static_cast<double>(k);
        }
        grids[i].edges[k] = box[i].hi;
    }

    const std::size_t n = cfg.samples / cfg.iterations;
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, chunks);

    double weight_sum = 0.0, weighted = 0.0;
    std::size_t total_hits = 0, total_samples = 0;
    std::vector<IterationEstimate> zero_variance;

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        std::vector<ChunkSums> sums(chunks);
        const auto run_chunk = [&](std::size_t c) {
            ChunkSums& cs = sums[c];
            cs.bin_weight.assign(d * k, 0.0);
            std::vector<double> x(d);
            std::vector<std::size_t> bin(d);
            const std::size_t end = std::min(n, (c + 1) * chunk_size);
            for (std::size_t j = c * chunk_size; j < end; ++j) {
                double jac = 1.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double y = uniform01(cfg.seed, it, j, i) * static_cast<double>(k);
                    const std::size_t b = std::min(static_cast<std::size_t>(y), k - 1);
                    const double w = grids[i].width(b);
                    x[i] = grids[i].edges[b] + (y - static_cast<double>(b)) * w;
                    jac *= w * static_cast<double>(k);
                    bin[i] = b;
                }
                if (!region.contains(x.data())) continue;
                double f = jac;
                for (std::size_t i = 0; i < d; ++i) f *= pdf(dists[i], x[i]);
                if (f == 0.0) continue;
                ++cs.hits;
                cs.sum += f;
                cs.sum_sq += f * f;
                for (std::size_t i = 0; i < d; ++i) cs.bin_weight[i * k + bin[i]] += f * f;
            }
        };
        if (workers <= 1) {
            for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
                });
            }
            for (auto& t : pool) t.join();
        }

        // combine in chunk order so the worker count cannot matter
        double sum = 0.0, sum_sq = 0.0;
        std::size_t hits = 0;
        std::vector<double> bin_weight(d * k, 0.0);
        for (const auto& cs : sums) {
            sum += cs.sum;
            sum_sq += cs.sum_sq;
            hits += cs.hits;
            for (std::size_t q = 0; q < d * k; ++q) bin_weight[q] += cs.bin_weight[q];
        }
        const double nn = static_cast<double>(n);
        const double mean = sum / nn;
        const double var = std::max(0.0, (sum_sq / nn - mean * mean) / (nn - 1.0));
        out.iterations.push_back({mean, std::sqrt(var), n, hits});

        if (it >= cfg.warmup) {
            total_hits += hits;
            total_samples += n;
            if (var > 0.0) {
                weight_sum += 1.0 / var;
                weighted += mean / var;
            } else {
                zero_variance.push_back(out.iterations.back());
            }
        }
        if (it + 1 < cfg.iterations) {
            for (std::size_t i = 0; i < d; ++i) {
                refine(grids[i], std::vector<double>(bin_weight.begin() + i * k, bin_weight.begin() + (i + 1) * k),
                       cfg.alpha);
            }
        }
    }

    if (weight_sum > 0.0) {
        out.p_max = weighted / weight_sum;
        out.e_stat = std::sqrt(1.0 / weight_sum);
    } else {
        // every kept iteration was constant (typically: no hits at all)
        double s = 0.0;
        for (const auto& z : zero_variance) s += z.value;
        out.p_max = zero_variance.empty() ? 0.0 : s / static_cast<double>(zero_variance.size());
    }
    out.p_max = std::clamp(out.p_max, 0.0, 1.0);
    out.hit_fraction = total_samples ? static_cast<double>(total_hits) / static_cast<double>(total_samples) : 0.0;
    return out;
}

double truncation_error(const std::vector<DistributionSpec>& dists, const std::vector<bool>& lifted, double t_int) {
    if (dists.size() != lifted.size()) throw std::invalid_argument("one lifted flag per distribution expected");
    double log_kept = 0.0;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        if (lifted[i]) log_kept += std::log1p(-interval_mass(dists[i], t_int, INFINITY));
    }
    return log_kept == 0.0 ? 0.0 : -std::expm1(log_kept);
}

std::vector<DimensionReport> integration_bounds(const UnrolledRac& u, double t_int, bool adapt, double tau) {
    std::vector<DimensionReport> dims;
    for (std::size_t c = 0; c < u.stochastic_dim(); ++c) {
        DimensionReport r;
        r.name = u.copy_name(c);
        r.distribution = u.distribution(c);
        r.unadapted = {0.0, t_int};
        r.adapted = adapt ? tighten_bounds(r.distribution, t_int, tau) : r.unadapted;
        r.integrated = r.adapted;
        dims.push_back(std::move(r));
    }
    return dims;
}

PipelineReport estimate_pipeline(const Rac& model, const GoalSpec& goal, const PipelineOptions& options) {
    const auto findings = validate(model);
    for (const auto& f : findings) {
        if (f.severity == Finding::Severity::violation) throw ModelError("invalid model: " + f.message);
    }
    if (sgn(options.t_max) <= 0) throw AnalysisError("T_max must be positive");
    if (!(options.t_int > 0.0) || !std::isfinite(options.t_int) || Scalar(options.t_int) < options.t_max) {
        throw AnalysisError("t_int must be finite and at least T_max");
    }
    if (options.vegas.samples < 1000) throw AnalysisError("at least 1000 samples are required");

    PipelineReport rep;
    for (const auto& f : findings) rep.warnings.push_back(f.message);

    auto t0 = WallClock::now();
    const UnrolledRac u = unroll(model, options.jmp);
    rep.unrolled_locations = u.locations.size();
    rep.seconds.unroll = since(t0);

    t0 = WallClock::now();
    std::vector<ReachTree> trees;
    for (std::size_t root : u.roots) {
        trees.push_back(build_reach_tree(u, root, {options.t_max, options.jmp, options.mode}));
        rep.stats.merge(trees.back().stats);
        rep.nodes += trees.back().nodes.size();
        for (const auto& w : trees.back().warnings) rep.warnings.push_back(w);
    }
    rep.trees = trees.size();
    rep.seconds.reach = since(t0);

    t0 = WallClock::now();
    const Scalar t_int_q(options.t_int);
    EliminationStats project_stats;
    const ForwardRegion region = assemble_forward_region(trees, u, goal, t_int_q, options.mode, &project_stats);
    rep.stats.merge(project_stats);
    for (const auto& m : region.members) rep.goal_nodes.emplace_back(m.tree, m.node);
    rep.seconds.project = since(t0);

    t0 = WallClock::now();
    const std::size_t d = region.dim;
    std::vector<DistributionSpec> all_dists;
    for (std::size_t c = 0; c < d; ++c) all_dists.push_back(u.distribution(c));
    rep.result.e_inf = truncation_error(all_dists, region.lifted, options.t_int);

    try {
        rep.dimensions = integration_bounds(u, options.t_int, options.adapt_bounds, options.tau);
    } catch (const DegenerateBoundsError& e) {
        rep.dimensions = integration_bounds(u, options.t_int, false);
        rep.warnings.push_back(std::string(e.what()) + "; probability is 0");
        rep.seconds.integrate = since(t0);
        return rep;
    }
    for (std::size_t c = 0; c < d; ++c) rep.dimensions[c].lifted = region.lifted[c];
    if (region.members.empty()) {
        rep.seconds.integrate = since(t0);
        return rep;
    }

    // dimensions with the same interval in every member and no coupling
    // factor out of the integral
    double factor = 1.0;
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < d; ++c) {
        std::optional<Interval> common;
        bool separable = true;
        for (const auto& m : region.members) {
            const auto iv = separable_interval(m.polytope, c);
            if (!iv || (common && !same(*common, *iv))) {
                separable = false;
                break;
            }
            common = iv;
        }
        DimensionReport& dr = rep.dimensions[c];
        if (options.marginalize && separable && common) {
            const double lo = std::max(dr.adapted.lo, common->lo ? round_down(*common->lo) : 0.0);
            const double hi = std::min(dr.adapted.hi, common->hi ? round_up(*common->hi) : options.t_int);
            dr.integrated = {lo, std::max(lo, hi)};
            dr.marginalized = true;
            factor *= interval_mass(dr.distribution, lo, std::max(lo, hi));
        } else {
            kept.push_back(c);
        }
    }

    std::vector<HPolytope> reduced;
    std::vector<std::size_t> map(d, HPolytope::npos);
    for (std::size_t i = 0; i < kept.size(); ++i) map[kept[i]] = i;
    for (const auto& m : region.members) {
        HPolytope p(d);
        for (const auto& row : m.polytope.constraints()) {
            const bool on_kept = std::any_of(kept.begin(), kept.end(), [&](std::size_t c) { return sgn(row.coeffs[c]) != 0; });
            if (on_kept) p.add(row);
        }
        reduced.push_back(p.reindexed(kept.size(), map));
    }

    std::vector<DistributionSpec> dists;
    std::vector<BoundPair> box;
    for (std::size_t c : kept) {
        DimensionReport& dr = rep.dimensions[c];
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : reduced) {
            const Box b = bounding_box(p);
            if (b.empty) continue;
            const Interval& iv = b.intervals[map[c]];
            lo = std::min(lo, iv.lo ? round_down(*iv.lo) : 0.0);
            hi = std::max(hi, iv.hi ? round_up(*iv.hi) : options.t_int);
        }
        lo = std::max(lo, dr.adapted.lo);
        hi = std::min(hi, dr.adapted.hi);
        dr.integrated = {lo, std::max(lo, hi)};
        dists.push_back(dr.distribution);
        box.push_back(dr.integrated);
    }

    rep.result = vegas_integrate(SampleRegion(kept.size(), reduced), dists, box, options.vegas);
    rep.result.p_max = std::clamp(rep.result.p_max * factor, 0.0, 1.0);
    rep.result.e_stat *= factor;
    rep.result.e_inf = truncation_error(all_dists, region.lifted, options.t_int);
    rep.seconds.integrate = since(t0);
    return rep;
}

}  // namespace racreach
