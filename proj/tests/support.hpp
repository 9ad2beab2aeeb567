#pragma once

// Deterministic fixture builders shared by the unit tests and the
// acceptance checks.  Everything is seeded: the same seed always produces
// the same scene.

#include <random>
#include <vector>

#include "qclab/extension.hpp"
#include "qclab/schottky.hpp"

namespace qclab::testing {

inline VecX random_point(std::mt19937_64& rng, int n, double span = 2.0) {
    std::uniform_real_distribution<double> u(-span, span);
    VecX p(n);
    for (int i = 0; i < n; ++i) p[i] = u(rng);
    return p;
}

inline Sphere random_sphere(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (u01(rng) < 0.25) {
        VecX normal = random_point(rng, n, 1.0);
        while (normal.norm() < 1e-3) normal = random_point(rng, n, 1.0);
        std::uniform_real_distribution<double> uoff(-1.5, 1.5);
        return Sphere::hyperplane(normal, uoff(rng));
    }
    std::uniform_real_distribution<double> ur(0.3, 1.8);
    return Sphere::round(random_point(rng, n, 2.0), ur(rng));
}

// A point kept away from the mirror itself so inversions stay well
// conditioned.
inline VecX random_point_off_sphere(std::mt19937_64& rng, const Sphere& s, double margin = 1e-3) {
    for (;;) {
        VecX p = random_point(rng, s.dim(), 3.0);
        if (std::abs(s.surface_gap(p)) < margin) continue;
        if (!s.plane && (p - s.center).norm() < margin) continue;
        return p;
    }
}

inline Ball image_of_ball(const MoebiusMap& w, Ball b) {
    for (auto it = w.mirrors.rbegin(); it != w.mirrors.rend(); ++it) b = qclab::image_of_ball(*it, b);
    return b;
}

// Three or four disjoint disks in the plane, centers drawn until the
// configuration validates with a comfortable gap.
inline SchottkySet random_disk_set(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> uc(-2.0, 2.0);
    std::uniform_real_distribution<double> ur(0.15, 0.35);
    for (;;) {
        SchottkySet set;
        set.n = 2;
        for (int i = 0; i < m; ++i) {
            VecX c(2);
            c[0] = uc(rng);
            c[1] = uc(rng);
            set.removed.push_back(Ball::round(c, ur(rng)));
        }
        ValidationReport rep = validate(set);
        if (rep.valid && rep.min_gap > 0.05) return set;
    }
}

struct MoebiusScene {
    BoundaryCorrespondence corr;
    MoebiusMap g;
};

// A disk configuration together with a Moebius word whose restrictions form
// the boundary data; the word is drawn again whenever its pole comes too
// close to a disk or an image ball degenerates.
inline MoebiusScene random_moebius_scene(std::uint64_t seed, int max_word_len = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> um(3, 4);
    const SchottkySet source = random_disk_set(rng, um(rng));
    std::uniform_int_distribution<int> ulen(1, max_word_len);
    for (;;) {
        MoebiusMap g;
        const int len = ulen(rng);
        for (int i = 0; i < len; ++i) g.mirrors.push_back(random_sphere(rng, 2));
        const ExtendedPoint pole = g.inverse()(ExtendedPoint::infinity(2));
        bool ok = true;
        if (!pole.infinite) {
            for (const Ball& b : source.removed)
                if ((pole.coords - b.center()).norm() < b.radius() + 0.1) ok = false;
        }
        if (!ok) continue;
        SchottkySet target;
        target.n = 2;
        for (const Ball& b : source.removed) {
            Ball ib = image_of_ball(g, b);
            if (!ib.bounded() || ib.radius() < 1e-3 || ib.radius() > 1e3) {
                ok = false;
                break;
            }
            target.removed.push_back(ib);
        }
        if (!ok) continue;
        if (!validate(target).valid) continue;
        MoebiusScene scene;
        scene.g = g;
        scene.corr.source = source;
        scene.corr.target = target;
        for (int i = 0; i < source.count(); ++i) {
            scene.corr.pairing.push_back(i);
            scene.corr.maps.push_back(BoundaryMap::from_moebius(g));
        }
        return scene;
    }
}

inline BoundaryCorrespondence self_correspondence(const SchottkySet& set) {
    BoundaryCorrespondence corr;
    corr.source = set;
    corr.target = set;
    for (int i = 0; i < set.count(); ++i) {
        corr.pairing.push_back(i);
        corr.maps.push_back(BoundaryMap::identity());
    }
    return corr;
}

// Evenly spread sample points of the square [-lo, hi]^2 avoiding ball
// centers (where inversions are undefined).
inline std::vector<VecX> plane_grid(const SchottkySet& set, int per_axis, double lo, double hi) {
    std::vector<VecX> pts;
    for (int i = 0; i < per_axis; ++i) {
        for (int j = 0; j < per_axis; ++j) {
            VecX p(2);
            p[0] = lo + (hi - lo) * (i + 0.5) / per_axis;
            p[1] = lo + (hi - lo) * (j + 0.5) / per_axis;
            bool at_center = false;
            for (const Ball& b : set.removed)
                if ((p - b.center()).norm() < 1e-6) at_center = true;
            if (!at_center) pts.push_back(p);
        }
    }
    return pts;
}

}
