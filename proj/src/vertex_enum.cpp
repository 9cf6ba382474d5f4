// Vertex and facet enumeration by the double description method.
//
// Both directions reduce to computing generators of a polyhedral cone
// { z | a_k . z <= 0 for all k }. The cone is built incrementally from the
// whole space (a basis of lines); each new row either splits off a line or
// cuts the current extreme rays, combining adjacent pairs across the
// hyperplane. Adjacency is the combinatorial test on zero sets.

#include "racreach/polytope.hpp"

#include <algorithm>
#include <cstdint>

namespace racreach {

namespace {

class ZeroSet {
public:
    ZeroSet() = default;
    explicit ZeroSet(std::size_t bits) : words_((bits + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

    ZeroSet operator&(const ZeroSet& o) const {
        ZeroSet r = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
        return r;
    }

    bool contains(const ZeroSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if ((o.words_[i] & ~words_[i]) != 0) return false;
        }
        return true;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct Ray {
    ScalarVector z;
    ZeroSet zeros;
};

struct ConeGenerators {
    std::vector<ScalarVector> lines;
    std::vector<ScalarVector> rays;
};

Scalar dot(const ScalarVector& a, const ScalarVector& b) {
    Scalar s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
    }
    return s;
}

void scale_primitive(ScalarVector& z) {
    auto it = std::find_if(z.begin(), z.end(), [](const Scalar& c) { return sgn(c) != 0; });
    if (it == z.end()) return;
    const Scalar f = 1 / abs(*it);
    for (auto& c : z) c *= f;
}

ConeGenerators double_description(const std::vector<ScalarVector>& rows, std::size_t dim) {
    std::vector<ScalarVector> lines;
    for (std::size_t i = 0; i < dim; ++i) {
        ScalarVector e(dim, Scalar(0));
        e[i] = 1;
        lines.push_back(std::move(e));
    }
    std::vector<Ray> rays;

    for (std::size_t k = 0; k < rows.size(); ++k) {
        const ScalarVector& a = rows[k];

        auto pivot_line = std::find_if(lines.begin(), lines.end(), [&](const ScalarVector& l) { return sgn(dot(a, l)) != 0; });
        if (pivot_line != lines.end()) {
            ScalarVector l = std::move(*pivot_line);
            lines.erase(pivot_line);
            Scalar al = dot(a, l);
            if (sgn(al) > 0) {
                for (auto& c : l) c = -c;
                al = -al;
            }
            for (auto& other : lines) {
                const Scalar f = dot(a, other) / al;
                if (sgn(f) == 0) continue;
                for (std::size_t i = 0; i < dim; ++i) other[i] -= f * l[i];
            }
            for (auto& r : rays) {
                const Scalar f = dot(a, r.z) / al;
                if (sgn(f) != 0) {
                    for (std::size_t i = 0; i < dim; ++i) r.z[i] -= f * l[i];
                    scale_primitive(r.z);
                }
                r.zeros.set(k);
            }
            Ray fresh{l, ZeroSet(rows.size())};
            for (std::size_t j = 0; j < k; ++j) fresh.zeros.set(j);
            scale_primitive(fresh.z);
            rays.push_back(std::move(fresh));
            continue;
        }

        std::vector<Scalar> values(rays.size());
        std::vector<std::size_t> pos, neg;
        std::vector<Ray> next;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            values[i] = dot(a, rays[i].z);
            const int s = sgn(values[i]);
            if (s > 0) pos.push_back(i);
            else if (s < 0) neg.push_back(i);
        }
        for (std::size_t p : pos) {
            for (std::size_t n : neg) {
                const ZeroSet common = rays[p].zeros & rays[n].zeros;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
                    if (r != p && r != n && rays[r].zeros.contains(common)) adjacent = false;
                }
                if (!adjacent) continue;
                Ray combined{ScalarVector(dim), common};
                for (std::size_t i = 0; i < dim; ++i) {
                    combined.z[i] = values[p] * rays[n].z[i] - values[n] * rays[p].z[i];
                }
                scale_primitive(combined.z);
                combined.zeros.set(k);
                next.push_back(std::move(combined));
            }
        }
        for (std::size_t i = 0; i < rays.size(); ++i) {
            const int s = sgn(values[i]);
            if (s > 0) continue;
            if (s == 0) rays[i].zeros.set(k);
            next.push_back(std::move(rays[i]));
        }
        rays = std::move(next);
    }

    ConeGenerators out;
    out.lines = std::move(lines);
    for (auto& r : rays) out.rays.push_back(std::move(r.z));
    return out;
}

bool lex_less(const ScalarVector& a, const ScalarVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const Scalar& x, const Scalar& y) { return x < y; });
}

}  // namespace

VPolytope to_vrep(const HPolytope& p) {
    const std::size_t n = p.dim();
    std::vector<ScalarVector> rows;
    {
        ScalarVector t_nonneg(n + 1, Scalar(0));
        t_nonneg[n] = -1;
        rows.push_back(std::move(t_nonneg));
    }
    for (const auto& row : p.constraints()) {
        ScalarVector h(row.coeffs);
        h.push_back(-row.bound);
        rows.push_back(std::move(h));
    }
    const ConeGenerators gen = double_description(rows, n + 1);

    VPolytope v;
    v.dim = n;
    for (const auto& z : gen.rays) {
        if (sgn(z[n]) > 0) {
            ScalarVector x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / z[n];
            v.vertices.push_back(std::move(x));
        } else {
            v.rays.emplace_back(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
        }
    }
    for (const auto& l : gen.lines) {
        ScalarVector d(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(n));
        scale_primitive(d);
        ScalarVector minus = d;
        for (auto& c : minus) c = -c;
        v.rays.push_back(std::move(d));
        v.rays.push_back(std::move(minus));
    }
    if (v.vertices.empty()) throw EmptySetError("vertex enumeration of an empty polytope");
    std::sort(v.vertices.begin(), v.vertices.end(), lex_less);
    std::sort(v.rays.begin(), v.rays.end(), lex_less);
    return v;
}

HPolytope to_hrep(const VPolytope& v) {
    const std::size_t n = v.dim;
    if (v.vertices.empty()) return HPolytope::empty_set(n);

    // Valid inequalities (a, beta):  a.v - beta <= 0,  a.r <= 0.
    std::vector<ScalarVector> rows;
    for (const auto& x : v.vertices) {
        if (x.size() != n) throw DimensionError("vertex dimension mismatch");
        ScalarVector h(x);
        h.emplace_back(-1);
        rows.push_back(std::move(h));
    }
    for (const auto& r : v.rays) {
        if (r.size() != n) throw DimensionError("ray dimension mismatch");
        ScalarVector h(r);
        h.emplace_back(0);
        rows.push_back(std::move(h));
    }
    const ConeGenerators gen = double_description(rows, n + 1);

    HPolytope out(n);
    for (const auto& z : gen.rays) {
        out.add_le(ScalarVector(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n)), z[n]);
    }
    for (const auto& l : gen.lines) {
        out.add_eq(ScalarVector(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(n)), l[n]);
    }
    out.deduplicate();
    return out;
}

}  // namespace racreach
