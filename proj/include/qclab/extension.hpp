#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qclab/diagnostics.hpp"
#include "qclab/geometry.hpp"
#include "qclab/sampling.hpp"
#include "qclab/schottky.hpp"

namespace qclab {

// Homeomorphism data between paired peripheral spheres.  Either a Moebius
// word (restricted to the sphere, but evaluable anywhere) or a unit-direction
// remap; the latter covers sampled tables and analytic direction actions.
struct BoundaryMap {
    enum class Kind { Moebius, Direction };
    Kind kind = Kind::Moebius;
    MoebiusMap moebius;                                  // Kind::Moebius
    std::function<VecX(const VecX&)> direction;          // Kind::Direction, unit -> unit

    static BoundaryMap identity() { return BoundaryMap{}; }

    static BoundaryMap from_moebius(MoebiusMap w) {
        BoundaryMap b;
        b.kind = Kind::Moebius;
        b.moebius = std::move(w);
        return b;
    }

    static BoundaryMap from_direction(std::function<VecX(const VecX&)> fn) {
        BoundaryMap b;
        b.kind = Kind::Direction;
        b.direction = std::move(fn);
        return b;
    }

    // n = 2 sampled table: entry j is the image angle of source angle
    // 2 pi j / M.  Interpolation happens on a continuous monotone lift.
    static BoundaryMap from_angle_table(std::vector<double> image_angles) {
        const std::size_t M = image_angles.size();
        if (M < 8) throw ConfigError("angle table needs at least 8 samples");
        std::vector<double> lift(M + 1);
        lift[0] = image_angles[0];
        const double two_pi = 2.0 * std::numbers::pi;
        for (std::size_t j = 1; j < M; ++j) {
            double step = image_angles[j] - image_angles[j - 1];
            step -= two_pi * std::floor(step / two_pi);  // into [0, 2 pi)
            lift[j] = lift[j - 1] + step;
        }
        lift[M] = lift[0] + two_pi;  // degree-one closing
        if (lift[M] <= lift[M - 1]) throw ConfigError("angle table is not a monotone degree-one circle map");
        return from_direction([lift, M, two_pi](const VecX& w) -> VecX {
            if (w.size() != 2) throw ConfigError("angle table map is two-dimensional");
            double th = std::atan2(w[1], w[0]);
            if (th < 0.0) th += two_pi;
            const double pos = th / two_pi * static_cast<double>(M);
            std::size_t j = std::min(static_cast<std::size_t>(pos), M - 1);
            const double frac = pos - static_cast<double>(j);
            const double phi = lift[j] + frac * (lift[j + 1] - lift[j]);
            VecX out(2);
            out << std::cos(phi), std::sin(phi);
            return out;
        });
    }

    // n >= 3 sampled table: inverse-distance blend of the four nearest
    // sampled directions, then renormalized.
    static BoundaryMap from_sphere_table(std::vector<VecX> inputs, std::vector<VecX> outputs) {
        if (inputs.size() != outputs.size() || inputs.size() < 8)
            throw ConfigError("sphere table needs at least 8 paired samples");
        for (auto& v : inputs) v.normalize();
        for (auto& v : outputs) v.normalize();
        return from_direction([inputs = std::move(inputs), outputs = std::move(outputs)](const VecX& w) -> VecX {
            std::vector<std::pair<double, std::size_t>> near;
            near.reserve(inputs.size());
            for (std::size_t i = 0; i < inputs.size(); ++i)
                near.emplace_back((inputs[i] - w).norm(), i);
            std::partial_sort(near.begin(), near.begin() + 4, near.end());
            if (near[0].first < 1e-12) return outputs[near[0].second];
            VecX acc = VecX::Zero(w.size());
            for (int k = 0; k < 4; ++k) acc += outputs[near[static_cast<std::size_t>(k)].second] / near[static_cast<std::size_t>(k)].first;
            const double nn = acc.norm();
            if (!(nn > 0.0)) throw EvaluationError("sphere table blend collapsed to zero");
            return acc / nn;
        });
    }
};

// Evaluates b on a point of the source sphere, producing a point of the
// target sphere.
inline VecX boundary_value(const BoundaryMap& b, const Ball& src, const Ball& dst, const VecX& x) {
    if (b.kind == BoundaryMap::Kind::Moebius) {
        ExtendedPoint y = b.moebius(ExtendedPoint::finite(x));
        if (y.infinite) throw EvaluationError("boundary map sent a sphere point to infinity");
        return y.coords;
    }
    VecX w = x - src.center();
    const double wn = w.norm();
    if (!(wn > 0.0)) throw EvaluationError("boundary map probed at the sphere center");
    VecX out = b.direction(w / wn);
    const double on = out.norm();
    if (!(on > 0.0)) throw EvaluationError("direction map returned a zero vector");
    return dst.center() + dst.radius() * (out / on);
}

// Pairing of two removed-ball families plus per-ball boundary homeomorphisms.
struct BoundaryCorrespondence {
    SchottkySet source;
    SchottkySet target;
    std::vector<int> pairing;        // source ball i  ->  target ball pairing[i]
    std::vector<BoundaryMap> maps;   // b_i : boundary of source i -> boundary of its partner

    int partner(int i) const { return pairing[static_cast<std::size_t>(i)]; }
    const Ball& src_ball(int i) const { return source.removed[static_cast<std::size_t>(i)]; }
    const Ball& dst_ball_of(int i) const { return target.removed[static_cast<std::size_t>(partner(i))]; }
};

inline ValidationReport validate(const BoundaryCorrespondence& corr, int samples = 64) {
    ValidationReport rep = validate(corr.source);
    ValidationReport rt = validate(corr.target);
    for (auto& is : rt.issues) {
        is.what = "target: " + is.what;
        rep.issues.push_back(is);
    }
    rep.valid = rep.valid && rt.valid;
    const int m = corr.source.count();
    if (corr.target.count() != m || static_cast<int>(corr.pairing.size()) != m ||
        static_cast<int>(corr.maps.size()) != m) {
        rep.valid = false;
        rep.issues.push_back({-1, -1, "correspondence arity mismatch"});
        return rep;
    }
    if (corr.source.n != corr.target.n) {
        rep.valid = false;
        rep.issues.push_back({-1, -1, "source and target dimensions differ"});
        return rep;
    }
    std::vector<char> hit(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        const int p = corr.pairing[static_cast<std::size_t>(i)];
        if (p < 0 || p >= m || hit[static_cast<std::size_t>(p)]) {
            rep.valid = false;
            rep.issues.push_back({i, p, "pairing is not a bijection"});
            return rep;
        }
        hit[static_cast<std::size_t>(p)] = 1;
    }
    if (!rep.valid) return rep;
    const std::vector<VecX> dirs = direction_grid(corr.source.n, samples);
    for (int i = 0; i < m; ++i) {
        const Ball& src = corr.src_ball(i);
        const Ball& dst = corr.dst_ball_of(i);
        double worst = 0.0;
        try {
            for (const VecX& w : dirs) {
                VecX x = src.center() + src.radius() * w;
                VecX y = boundary_value(corr.maps[static_cast<std::size_t>(i)], src, dst, x);
                worst = std::max(worst, std::abs((y - dst.center()).norm() - dst.radius()));
            }
        } catch (const Error& e) {
            rep.valid = false;
            rep.issues.push_back({i, -1, "boundary map " + std::to_string(i) + " failed: " + e.what()});
            continue;
        }
        if (worst > 1e-9 * std::max(1.0, dst.radius())) {
            rep.valid = false;
            rep.issues.push_back({i, -1, "boundary map " + std::to_string(i) +
                                             " misses its target sphere (deviation " + std::to_string(worst) + ")"});
        }
    }
    return rep;
}

inline void require_valid(const BoundaryCorrespondence& corr) {
    ValidationReport rep = validate(corr);
    if (!rep.valid) throw ConfigError("invalid correspondence: " + rep.message());
}

// Values of the map on the complement of the removed balls.  `contains` may
// narrow the domain; evaluation errors name the offending point.
struct LambdaMap {
    std::function<ExtendedPoint(const ExtendedPoint&)> eval;
    std::function<bool(const ExtendedPoint&)> contains = [](const ExtendedPoint&) { return true; };

    static LambdaMap identity() {
        LambdaMap lm;
        lm.eval = [](const ExtendedPoint& x) { return x; };
        return lm;
    }

    static LambdaMap from_moebius(MoebiusMap g) {
        LambdaMap lm;
        lm.eval = [g = std::move(g)](const ExtendedPoint& x) { return g(x); };
        return lm;
    }
};

// Cone extension into the ball: x = c + t rho w maps to the point at the
// same relative radius t on the segment from the target center toward the
// image of the boundary point.
inline VecX radial_extend(const BoundaryMap& b, const Ball& src, const Ball& dst, const VecX& x) {
    VecX d = x - src.center();
    const double dn = d.norm();
    const double t = dn / src.radius();
    if (!(dn > 0.0)) return dst.center();
    VecX boundary_pt = src.center() + src.radius() * (d / dn);
    VecX y = boundary_value(b, src, dst, boundary_pt);
    VecX dir = y - dst.center();
    const double rn = dir.norm();
    if (!(rn > 0.0)) throw EvaluationError("radial extension collapsed at the target center");
    return dst.center() + t * dst.radius() * (dir / rn);
}

enum class BaseStrategy { MoebiusIfAvailable, Radial };

// Group-equivariant extension: unfold to the complement, evaluate the
// complement map, and push the value back through the mirrored word in the
// target reflections.  Depth-capped points fall back to the per-ball base
// extension at the deepest level.
struct EquivariantMap {
    BoundaryCorrespondence corr;
    LambdaMap lambda;
    BaseStrategy strategy = BaseStrategy::MoebiusIfAvailable;
    int max_depth = 20;

    ExtendedPoint evaluate(const ExtendedPoint& x) const {
        UnfoldResult u = unfold(corr.source, x, max_depth);
        ExtendedPoint v;
        if (u.status == UnfoldStatus::Landed) {
            if (!lambda.contains(u.terminal))
                throw EvaluationError("complement map undefined at unfolded point " + to_string(u.terminal));
            v = lambda.eval(u.terminal);
        } else {
            const int j = u.capped_ball;
            const BoundaryMap& b = corr.maps[static_cast<std::size_t>(j)];
            if (strategy == BaseStrategy::MoebiusIfAvailable && b.kind == BoundaryMap::Kind::Moebius) {
                v = b.moebius(u.terminal);
            } else {
                if (u.terminal.infinite)
                    throw EvaluationError("depth-capped at infinity; no radial value");
                v = ExtendedPoint::finite(
                    radial_extend(b, corr.src_ball(j), corr.dst_ball_of(j), u.terminal.coords));
            }
        }
        for (auto it = u.word.letters.rbegin(); it != u.word.letters.rend(); ++it)
            v = invert(corr.target.mirror(corr.partner(*it)), v);
        return v;
    }

    ExtendedPoint evaluate(const VecX& x) const { return evaluate(ExtendedPoint::finite(x)); }
};

// Worst chordal mismatch of f(gamma_i x) against gamma'_i f(x) over samples.
inline double check_equivariance(const EquivariantMap& em, int generator, const std::vector<VecX>& samples) {
    if (generator < 0 || generator >= em.corr.source.count())
        throw ConfigError("check_equivariance: generator out of range");
    const Sphere& g = em.corr.source.mirror(generator);
    const Sphere& gp = em.corr.target.mirror(em.corr.partner(generator));
    double worst = 0.0;
    for (const VecX& x : samples) {
        ExtendedPoint lhs = em.evaluate(invert(g, ExtendedPoint::finite(x)));
        ExtendedPoint rhs = invert(gp, em.evaluate(ExtendedPoint::finite(x)));
        worst = std::max(worst, chordal_distance(lhs, rhs));
    }
    return worst;
}

// Two-part residual for an equivariant extension:
//  * word_defect   -- worst chordal gap between f(gamma_i x) and gamma'_{p(i)} f(x)
//                     on rings slightly outside each peripheral sphere;
//  * boundary_defect -- worst chordal gap between f and the prescribed boundary
//                     data on the peripheral spheres themselves.
// A pairing that disagrees with the boundary data leaves the word identity
// intact (it holds by construction) but blows up the boundary term, so the
// overall residual is the max of the two.
struct EquivarianceReport {
    double word_defect = 0.0;
    double boundary_defect = 0.0;
    double max_defect = 0.0;
};

inline EquivarianceReport equivariance_residual(const EquivariantMap& em, int samples_per_sphere) {
    if (samples_per_sphere < 2) throw ConfigError("equivariance_residual: need at least 2 samples per sphere");
    EquivarianceReport rep;
    const int n = em.corr.source.n;
    const std::vector<VecX> dirs = direction_grid(n, samples_per_sphere);
    for (int i = 0; i < em.corr.source.count(); ++i) {
        const Ball& src = em.corr.src_ball(i);
        const Ball& dst = em.corr.dst_ball_of(i);
        const BoundaryMap& b = em.corr.maps[static_cast<std::size_t>(i)];
        std::vector<VecX> ring;
        ring.reserve(dirs.size());
        for (const VecX& w : dirs) {
            ring.push_back(src.center() + 1.05 * src.radius() * w);
            const VecX on = src.center() + src.radius() * w;
            ExtendedPoint got = em.evaluate(ExtendedPoint::finite(on));
            VecX want = boundary_value(b, src, dst, on);
            rep.boundary_defect = std::max(rep.boundary_defect, chordal_distance(got, ExtendedPoint::finite(want)));
        }
        rep.word_defect = std::max(rep.word_defect, check_equivariance(em, i, ring));
    }
    rep.max_defect = std::max(rep.word_defect, rep.boundary_defect);
    return rep;
}

struct SurveyRow {
    VecX point;
    int word_length = 0;
    bool landed = true;
    ExtendedPoint value;
    std::vector<double> H;  // aligned with the radius ladder, NaN on failure
    bool ok = true;
    std::string error;
};

struct SurveySummary {
    std::vector<double> radii;
    std::vector<double> max_H;
    std::vector<double> median_H;
    std::size_t evaluated = 0;
    std::size_t failed = 0;
};

struct SurveyReport {
    std::vector<SurveyRow> rows;
    SurveySummary summary;
};

inline SurveyReport dilatation_survey(const EquivariantMap& em, const std::vector<VecX>& grid,
                                      std::vector<double> radii, int directions) {
    std::sort(radii.begin(), radii.end(), std::greater<double>());
    SurveyReport rep;
    rep.summary.radii = radii;
    rep.rows.resize(grid.size());
    auto f = [&em](const VecX& x) -> VecX {
        ExtendedPoint v = em.evaluate(x);
        if (v.infinite) throw EvaluationError("value at infinity inside a dilatation probe");
        return v.coords;
    };
    parallel_for(grid.size(), [&](std::size_t i) {
        SurveyRow row;
        row.point = grid[i];
        try {
            UnfoldResult u = unfold(em.corr.source, ExtendedPoint::finite(grid[i]), em.max_depth);
            row.word_length = u.word.length();
            row.landed = u.status == UnfoldStatus::Landed;
            row.value = em.evaluate(grid[i]);
            DilatationProfile prof = local_dilatation(f, grid[i], radii, directions);
            row.H = prof.H;
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
        rep.rows[i] = std::move(row);
    });
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        std::vector<double> hs;
        for (const auto& row : rep.rows)
            if (row.ok && ri < row.H.size() && std::isfinite(row.H[ri])) hs.push_back(row.H[ri]);
        if (hs.empty()) {
            rep.summary.max_H.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.summary.median_H.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        rep.summary.max_H.push_back(*std::max_element(hs.begin(), hs.end()));
        auto mid = hs.begin() + static_cast<std::ptrdiff_t>(hs.size() / 2);
        std::nth_element(hs.begin(), mid, hs.end());
        rep.summary.median_H.push_back(*mid);
    }
    for (const auto& row : rep.rows) {
        if (row.ok)
            ++rep.summary.evaluated;
        else
            ++rep.summary.failed;
    }
    return rep;
}

}
