#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qclab/errors.hpp"

namespace qclab {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Point of the one-point compactification of R^n.  The point at infinity is
// represented explicitly; coords are meaningless while `infinite` is set.
struct ExtendedPoint {
    bool infinite = false;
    VecX coords;

    static ExtendedPoint finite(VecX v) { return ExtendedPoint{false, std::move(v)}; }
    static ExtendedPoint infinity(int n) { return ExtendedPoint{true, VecX::Zero(n)}; }

    int dim() const { return static_cast<int>(coords.size()); }
};

inline std::string to_string(const ExtendedPoint& p) {
    if (p.infinite) return "inf";
    std::ostringstream os;
    os << "(" << p.coords.transpose() << ")";
    return os.str();
}

// A round sphere |x - c| = r, or a hyperplane {x : n.x = offset} regarded as
// the sphere through infinity.  For planes `center` holds the unit normal and
// `radius` the offset.
struct Sphere {
    bool plane = false;
    VecX center;
    double radius = 1.0;

    static Sphere round(VecX c, double r) {
        if (!(r > 0.0)) throw ConfigError("sphere radius must be positive");
        return Sphere{false, std::move(c), r};
    }

    static Sphere hyperplane(VecX normal, double offset) {
        double n = normal.norm();
        if (!(n > 0.0)) throw ConfigError("hyperplane normal must be nonzero");
        return Sphere{true, normal / n, offset / n};
    }

    int dim() const { return static_cast<int>(center.size()); }

    // Signed for planes (n.x - offset), unsigned distance-to-surface for rounds.
    double surface_gap(const VecX& x) const {
        if (plane) return center.dot(x) - radius;
        return (x - center).norm() - radius;
    }

    bool contains_infinity() const { return plane; }
};

// Canonical orientation for comparisons and serialization: the first normal
// component larger than 1e-12 in magnitude is made positive.
inline Sphere canonical(const Sphere& s) {
    if (!s.plane) return s;
    for (int i = 0; i < s.center.size(); ++i) {
        if (std::abs(s.center[i]) > 1e-12) {
            if (s.center[i] < 0.0) return Sphere{true, -s.center, -s.radius};
            return s;
        }
    }
    return s;
}

// Reflection (inversion) in a sphere.  For a round sphere S(c, r):
//   x  ->  c + r^2 (x - c) / |x - c|^2,   c <-> inf.
// For a hyperplane the usual mirror reflection; infinity stays put.
inline ExtendedPoint invert(const Sphere& s, const ExtendedPoint& x) {
    if (!x.infinite && x.dim() != s.dim())
        throw ConfigError("invert: dimension mismatch");
    if (s.plane) {
        if (x.infinite) return x;
        const double g = s.center.dot(x.coords) - s.radius;
        return ExtendedPoint::finite(x.coords - 2.0 * g * s.center);
    }
    if (x.infinite) return ExtendedPoint::finite(s.center);
    VecX d = x.coords - s.center;
    const double q = d.squaredNorm();
    if (q == 0.0) return ExtendedPoint::infinity(s.dim());
    return ExtendedPoint::finite(s.center + (s.radius * s.radius / q) * d);
}

inline ExtendedPoint invert(const Sphere& s, const VecX& x) {
    return invert(s, ExtendedPoint::finite(x));
}

// Setwise image of one sphere under reflection in another.  Mirror center on
// the target (within 1e-12) turns a round target into a hyperplane and vice
// versa; all four round/plane combinations are covered.
inline Sphere image_of_sphere(const Sphere& mirror, const Sphere& target) {
    if (mirror.dim() != target.dim())
        throw ConfigError("image_of_sphere: dimension mismatch");
    constexpr double kThroughTol = 1e-12;

    if (mirror.plane) {
        // Euclidean isometry: reflect the defining data.
        if (target.plane) {
            const double mn = target.center.dot(mirror.center);
            VecX normal = target.center - 2.0 * mn * mirror.center;
            const double offset = target.radius - 2.0 * mirror.radius * mn;
            return canonical(Sphere::hyperplane(std::move(normal), offset));
        }
        ExtendedPoint c = invert(mirror, ExtendedPoint::finite(target.center));
        return Sphere::round(c.coords, target.radius);
    }

    const VecX& c = mirror.center;
    const double r2 = mirror.radius * mirror.radius;

    if (target.plane) {
        const double gap = target.center.dot(c) - target.radius;
        if (std::abs(gap) <= kThroughTol) return canonical(target);  // plane through center: fixed setwise
        // Image is the sphere with diameter from c to the image of the foot point.
        VecX tip = c - (r2 / gap) * target.center;
        return Sphere::round(0.5 * (c + tip), 0.5 * r2 / std::abs(gap));
    }

    const VecX d = target.center - c;
    const double dn = d.norm();
    if (std::abs(dn - target.radius) <= kThroughTol) {
        // Target passes through the mirror center: image is a hyperplane.
        if (dn == 0.0) throw InternalError("image_of_sphere: degenerate through-center data");
        VecX u = d / dn;
        VecX far = target.center + target.radius * u;
        ExtendedPoint img = invert(mirror, ExtendedPoint::finite(far));
        return canonical(Sphere::hyperplane(u, u.dot(img.coords)));
    }
    const double k = r2 / (dn * dn - target.radius * target.radius);
    return Sphere::round(c + k * d, std::abs(k) * target.radius);
}

enum class Side { Interior, Exterior };

// Open ball bounded by a sphere.  Interior of a round sphere is the bounded
// component; for planes "Interior" means the side where n.x < offset.  The
// exterior of a round sphere contains infinity; half-spaces do not (infinity
// sits on every sphere through it).
struct Ball {
    Sphere sphere;
    Side side = Side::Interior;

    static Ball round(VecX c, double r) { return Ball{Sphere::round(std::move(c), r), Side::Interior}; }

    int dim() const { return sphere.dim(); }
    bool bounded() const { return !sphere.plane && side == Side::Interior; }

    const VecX& center() const {
        if (!bounded()) throw ConfigError("ball is not a bounded ball");
        return sphere.center;
    }
    double radius() const {
        if (!bounded()) throw ConfigError("ball is not a bounded ball");
        return sphere.radius;
    }

    bool contains(const ExtendedPoint& x) const {
        if (x.infinite) return !sphere.plane && side == Side::Exterior;
        const double g = sphere.surface_gap(x.coords);
        return side == Side::Interior ? g < 0.0 : g > 0.0;
    }

    // A point guaranteed to lie in the open region; used to track sides
    // through reflections.
    ExtendedPoint witness() const {
        if (sphere.plane) {
            const double s = side == Side::Interior ? -1.0 : 1.0;
            return ExtendedPoint::finite(sphere.radius * sphere.center + s * sphere.center);
        }
        if (side == Side::Interior) return ExtendedPoint::finite(sphere.center);
        return ExtendedPoint::infinity(dim());
    }
};

inline Ball image_of_ball(const Sphere& mirror, const Ball& b) {
    Sphere s = image_of_sphere(mirror, b.sphere);
    ExtendedPoint w = invert(mirror, b.witness());
    Ball candidate{s, Side::Interior};
    if (candidate.contains(w)) return candidate;
    candidate.side = Side::Exterior;
    if (!candidate.contains(w))
        throw InternalError("image_of_ball: witness landed on the image sphere");
    return candidate;
}

// Chordal metric of the one-point compactification:
//   d(x, y) = 2|x - y| / (sqrt(1+|x|^2) sqrt(1+|y|^2)),  d(x, inf) = 2 / sqrt(1+|x|^2).
// Bounded by 2, realized by antipodes.
inline double chordal_distance(const ExtendedPoint& x, const ExtendedPoint& y) {
    if (x.infinite && y.infinite) return 0.0;
    if (x.infinite) return 2.0 / std::sqrt(1.0 + y.coords.squaredNorm());
    if (y.infinite) return 2.0 / std::sqrt(1.0 + x.coords.squaredNorm());
    if (x.dim() != y.dim()) throw ConfigError("chordal_distance: dimension mismatch");
    const double sx = std::sqrt(1.0 + x.coords.squaredNorm());
    const double sy = std::sqrt(1.0 + y.coords.squaredNorm());
    return 2.0 * (x.coords - y.coords).norm() / (sx * sy);
}

inline double chordal_distance(const VecX& x, const VecX& y) {
    return chordal_distance(ExtendedPoint::finite(x), ExtendedPoint::finite(y));
}

// Applies the composition g_1 . g_2 ... g_k of the reflections in the listed
// mirrors, i.e. the LAST mirror acts first.  Empty word is the identity.
inline ExtendedPoint apply_word(std::span<const Sphere> mirrors, ExtendedPoint x) {
    for (auto it = mirrors.rbegin(); it != mirrors.rend(); ++it) x = invert(*it, x);
    return x;
}

// Moebius transformation stored as a word of reflections.  Inverse = the
// reversed word, since every letter is an involution.
struct MoebiusMap {
    std::vector<Sphere> mirrors;

    ExtendedPoint operator()(const ExtendedPoint& x) const {
        return apply_word(std::span<const Sphere>(mirrors), x);
    }
    ExtendedPoint operator()(const VecX& x) const { return (*this)(ExtendedPoint::finite(x)); }

    MoebiusMap inverse() const {
        MoebiusMap inv;
        inv.mirrors.assign(mirrors.rbegin(), mirrors.rend());
        return inv;
    }

    bool identity() const { return mirrors.empty(); }
};

// sigma_max / sigma_min of a square matrix plus the flags derived from it.
// Conformal means all singular values agree (the map is lambda * orthogonal).
struct LinearMapSummary {
    MatX matrix;
    VecX singular_values;  // decreasing
    double dilatation = 1.0;
    double scale = 1.0;  // mean singular value; equals lambda for conformal maps
    bool degenerate = false;
    bool conformal = false;
};

inline LinearMapSummary linear_dilatation(const MatX& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ConfigError("linear_dilatation: square matrix required");
    LinearMapSummary out;
    out.matrix = m;
    Eigen::JacobiSVD<MatX> svd(m);
    out.singular_values = svd.singularValues();
    const double smax = out.singular_values[0];
    const double smin = out.singular_values[out.singular_values.size() - 1];
    out.scale = out.singular_values.mean();
    if (smin <= 1e-12 * std::max(smax, 1e-300)) {
        out.degenerate = true;
        out.dilatation = std::numeric_limits<double>::infinity();
        return out;
    }
    out.dilatation = smax / smin;
    out.conformal = out.dilatation <= 1.0 + 1e-9;
    return out;
}

}
