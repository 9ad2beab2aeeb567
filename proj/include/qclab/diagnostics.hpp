#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qclab/geometry.hpp"
#include "qclab/sampling.hpp"
#include "qclab/schottky.hpp"

namespace qclab {

// L(p, r) / l(p, r) sampled over a direction grid at a decreasing radius
// ladder.  k_estimate is H at the smallest usable radius; trend_slope the
// least-squares slope of H against log r over the last three rungs.
struct DilatationProfile {
    VecX point;
    std::vector<double> radii;   // decreasing
    std::vector<double> L, l, H; // aligned with radii, NaN where a rung failed
    double k_estimate = 1.0;
    double trend_slope = 0.0;
    std::vector<int> gaps;  // indices of radii that could not be evaluated
};

template <typename F>
DilatationProfile local_dilatation(F&& f, const VecX& p, std::vector<double> radii, int m) {
    if (radii.empty()) throw ConfigError("local_dilatation: no radii");
    std::sort(radii.begin(), radii.end(), std::greater<double>());
    DilatationProfile prof;
    prof.point = p;
    prof.radii = radii;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    prof.L.assign(radii.size(), nan);
    prof.l.assign(radii.size(), nan);
    prof.H.assign(radii.size(), nan);
    const int n = static_cast<int>(p.size());
    const std::vector<VecX> dirs = direction_grid(n, m);
    bool have_fp = true;
    VecX fp;
    try {
        fp = f(p);
    } catch (const Error&) {
        have_fp = false;
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!have_fp) {
            prof.gaps.push_back(static_cast<int>(i));
            continue;
        }
        const double r = radii[i];
        double big = 0.0, small = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (const VecX& w : dirs) {
            try {
                const double d = (f(p + r * w) - fp).norm();
                big = std::max(big, d);
                small = std::min(small, d);
            } catch (const Error&) {
                ok = false;
                break;
            }
        }
        if (!ok || !(small > 0.0) || !std::isfinite(big)) {
            prof.gaps.push_back(static_cast<int>(i));
            continue;
        }
        prof.L[i] = big;
        prof.l[i] = small;
        prof.H[i] = big / small;
    }
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (std::isfinite(prof.H[i])) usable.push_back(i);
    if (!usable.empty()) {
        prof.k_estimate = prof.H[usable.back()];
        if (usable.size() >= 2) {
            const std::size_t w = std::min<std::size_t>(3, usable.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t j = usable.size() - w; j < usable.size(); ++j) {
                const double x = std::log(prof.radii[usable[j]]);
                const double y = prof.H[usable[j]];
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            const double det = w * sxx - sx * sx;
            if (std::abs(det) > 0.0) prof.trend_slope = (w * sxy - sx * sy) / det;
        }
    }
    return prof;
}

// Scatter of (t, ratio) with t = |x - x'| / |x - x''| and
// ratio = |f(x) - f(x')| / |f(x) - f(x'')|, plus the max-ratio envelope over
// log-spaced t buckets.  Triples with vanishing denominators are skipped.
struct QsSample {
    double t = 0.0, ratio = 0.0;
};

struct QsReport {
    std::vector<QsSample> samples;
    std::vector<double> bucket_t;    // geometric bucket centers
    std::vector<double> envelope;    // max ratio per bucket (0 where empty)
    std::size_t skipped = 0;
};

template <typename F>
QsReport quasisymmetry_samples(F&& f, const std::vector<std::array<VecX, 3>>& triples, int buckets = 64) {
    QsReport rep;
    rep.samples.reserve(triples.size());
    for (const auto& tr : triples) {
        const double dxm = (tr[0] - tr[2]).norm();
        const double dx = (tr[0] - tr[1]).norm();
        if (!(dxm > 0.0)) {
            rep.skipped++;
            continue;
        }
        VecX fx = f(tr[0]), fxp = f(tr[1]), fxpp = f(tr[2]);
        const double dym = (fx - fxpp).norm();
        if (!(dym > 0.0)) {
            rep.skipped++;
            continue;
        }
        rep.samples.push_back(QsSample{dx / dxm, (fx - fxp).norm() / dym});
    }
    if (rep.samples.empty() || buckets < 1) return rep;
    double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
    for (const auto& s : rep.samples) {
        if (s.t > 0.0) tmin = std::min(tmin, s.t);
        tmax = std::max(tmax, s.t);
    }
    if (!(tmax > 0.0) || !(tmin < tmax)) return rep;
    rep.bucket_t.resize(static_cast<std::size_t>(buckets));
    rep.envelope.assign(static_cast<std::size_t>(buckets), 0.0);
    const double lmin = std::log(tmin), lmax = std::log(tmax);
    for (int b = 0; b < buckets; ++b)
        rep.bucket_t[static_cast<std::size_t>(b)] = std::exp(lmin + (b + 0.5) * (lmax - lmin) / buckets);
    for (const auto& s : rep.samples) {
        if (!(s.t > 0.0)) continue;
        int b = static_cast<int>(std::floor((std::log(s.t) - lmin) / (lmax - lmin) * buckets));
        b = std::clamp(b, 0, buckets - 1);
        auto& e = rep.envelope[static_cast<std::size_t>(b)];
        e = std::max(e, s.ratio);
    }
    return rep;
}

// x -> (f(p + r x) - f(p)) / r.  Blows the r-scale picture at p up to unit size.
template <typename F>
auto rescaled_map(F f, VecX p, double r) {
    if (!(r > 0.0)) throw ConfigError("rescaled_map: radius must be positive");
    VecX fp = f(p);
    return [f = std::move(f), p = std::move(p), fp = std::move(fp), r](const VecX& x) -> VecX {
        return (f(p + r * x) - fp) / r;
    };
}

// Least-squares sphere through a point cloud: linear algebraic fit followed
// by one Gauss-Newton step on the geometric residuals.  residual is the
// maximum radial deviation relative to the fitted radius.
struct RoundnessReport {
    VecX center;
    double radius = 0.0;
    double residual = 0.0;
    bool degenerate = false;
};

inline RoundnessReport roundness(const std::vector<VecX>& pts) {
    if (pts.empty()) throw ConfigError("roundness: empty point set");
    const int n = static_cast<int>(pts[0].size());
    if (static_cast<int>(pts.size()) < n + 2)
        throw ConfigError("roundness: need at least dimension + 2 points");
    const auto rows = static_cast<Eigen::Index>(pts.size());
    MatX A(rows, n + 1);
    VecX rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const VecX& x = pts[static_cast<std::size_t>(i)];
        if (static_cast<int>(x.size()) != n) throw ConfigError("roundness: mixed dimensions");
        A.block(i, 0, 1, n) = 2.0 * x.transpose();
        A(i, n) = 1.0;
        rhs(i) = x.squaredNorm();
    }
    RoundnessReport rep;
    rep.center = VecX::Zero(n);
    Eigen::ColPivHouseholderQR<MatX> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < n + 1) {
        rep.degenerate = true;
        return rep;
    }
    VecX sol = qr.solve(rhs);
    VecX c = sol.head(n);
    const double rho2 = sol(n) + c.squaredNorm();
    if (!(rho2 > 0.0)) {
        rep.degenerate = true;
        return rep;
    }
    double rho = std::sqrt(rho2);

    // One Gauss-Newton step on e_i = |x_i - c| - rho.
    MatX J(rows, n + 1);
    VecX e(rows);
    bool gn_ok = true;
    for (Eigen::Index i = 0; i < rows; ++i) {
        VecX d = pts[static_cast<std::size_t>(i)] - c;
        const double dn = d.norm();
        if (dn < 1e-14) {
            gn_ok = false;
            break;
        }
        J.block(i, 0, 1, n) = -(d / dn).transpose();
        J(i, n) = -1.0;
        e(i) = dn - rho;
    }
    if (gn_ok) {
        VecX step = J.colPivHouseholderQr().solve(-e);
        VecX c2 = c + step.head(n);
        const double rho2b = rho + step(n);
        if (rho2b > 0.0) {
            c = c2;
            rho = rho2b;
        }
    }

    if (!(rho > 1e-12) || !(rho < 1e12) || !std::isfinite(rho)) {
        rep.degenerate = true;
        return rep;
    }
    rep.center = c;
    rep.radius = rho;
    double worst = 0.0;
    for (const VecX& x : pts) worst = std::max(worst, std::abs((x - c).norm() - rho));
    rep.residual = worst / rho;
    return rep;
}

// Central-difference Jacobian at step h.  observed_order compares the h vs
// h/2 and h/2 vs h/4 estimates; second-order differences give about 2.
struct JacobianEstimate {
    MatX matrix;
    double step = 1e-5;
    LinearMapSummary summary;
    double observed_order = 0.0;
};

template <typename F>
MatX central_difference_jacobian(F&& f, const VecX& p, double h) {
    const int n = static_cast<int>(p.size());
    MatX J(n, n);
    for (int j = 0; j < n; ++j) {
        VecX e = VecX::Zero(n);
        e[j] = h;
        VecX hi = f(p + e), lo = f(p - e);
        if (hi.size() != n || lo.size() != n)
            throw ConfigError("central_difference_jacobian: map changes dimension");
        J.col(j) = (hi - lo) / (2.0 * h);
    }
    return J;
}

template <typename F>
JacobianEstimate estimate_jacobian(F&& f, const VecX& p, double h = 1e-5) {
    if (!(h > 0.0)) throw ConfigError("estimate_jacobian: step must be positive");
    JacobianEstimate est;
    est.step = h;
    est.matrix = central_difference_jacobian(f, p, h);
    MatX j2 = central_difference_jacobian(f, p, h / 2.0);
    MatX j4 = central_difference_jacobian(f, p, h / 4.0);
    const double d12 = (est.matrix - j2).norm();
    const double d24 = (j2 - j4).norm();
    est.observed_order = (d12 > 0.0 && d24 > 0.0) ? std::log2(d12 / d24) : 2.0;
    est.summary = linear_dilatation(est.matrix);
    return est;
}

// Dichotomy probe along a nested ball chain: rescaled boundary images either
// round off (conformal at the core point) or the roundness residual refuses
// to drop.  Radii collapsing or a singular Jacobian mark degeneracy.
enum class ConformalityVerdict { Conformal, NonConformal, Degenerate };

inline const char* to_string(ConformalityVerdict v) {
    switch (v) {
        case ConformalityVerdict::Conformal: return "CONFORMAL";
        case ConformalityVerdict::NonConformal: return "NON_CONFORMAL";
        default: return "DEGENERATE";
    }
}

struct NestedBallReport {
    std::vector<double> ball_radii;
    std::vector<double> residuals;
    std::vector<bool> fit_degenerate;
    JacobianEstimate jacobian;
    ConformalityVerdict verdict = ConformalityVerdict::NonConformal;
};

template <typename F>
NestedBallReport nested_ball_conformality_test(F&& f, const VecX& p, const std::vector<Ball>& balls, int m = 256) {
    if (balls.empty()) throw ConfigError("nested_ball_conformality_test: no balls");
    NestedBallReport rep;
    const int n = static_cast<int>(p.size());
    const std::vector<VecX> dirs = direction_grid(n, m);
    for (const Ball& b : balls) {
        if (!b.bounded()) throw ConfigError("nested_ball_conformality_test: bounded balls required");
        if (!((p - b.center()).norm() < b.radius()))
            throw ConfigError("nested_ball_conformality_test: ball does not contain the base point");
        const double r = b.radius();
        VecX fc = f(b.center());
        std::vector<VecX> img;
        img.reserve(dirs.size());
        for (const VecX& w : dirs) img.push_back((f(b.center() + r * w) - fc) / r);
        RoundnessReport rr = roundness(img);
        rep.ball_radii.push_back(r);
        rep.residuals.push_back(rr.residual);
        rep.fit_degenerate.push_back(rr.degenerate);
    }
    rep.jacobian = estimate_jacobian(f, p, std::min(1e-5, balls.back().radius() * 1e-2));
    std::size_t degen = 0;
    for (bool d : rep.fit_degenerate)
        if (d) ++degen;
    if (rep.jacobian.summary.degenerate || degen * 2 > rep.fit_degenerate.size()) {
        rep.verdict = ConformalityVerdict::Degenerate;
    } else if (!rep.fit_degenerate.back() && rep.residuals.back() <= 1e-3 &&
               rep.jacobian.summary.dilatation <= 1.01) {
        rep.verdict = ConformalityVerdict::Conformal;
    } else {
        rep.verdict = ConformalityVerdict::NonConformal;
    }
    return rep;
}

// sup_q |f(q + s w) - f(q) - J_q (s w)| / s over base points and directions,
// one row per scale.  Jacobians are frozen per base point.
struct ModulusTable {
    std::vector<double> scales;
    std::vector<double> modulus;
};

template <typename F>
ModulusTable differentiability_modulus(F&& f, const std::vector<VecX>& base_points,
                                       std::vector<double> scales, int m, double h = 1e-5) {
    if (base_points.empty()) throw ConfigError("differentiability_modulus: no base points");
    std::sort(scales.begin(), scales.end(), std::greater<double>());
    const int n = static_cast<int>(base_points[0].size());
    const std::vector<VecX> dirs = direction_grid(n, m);
    std::vector<MatX> jac;
    std::vector<VecX> fq;
    jac.reserve(base_points.size());
    for (const VecX& q : base_points) {
        jac.push_back(central_difference_jacobian(f, q, h));
        fq.push_back(f(q));
    }
    ModulusTable tab;
    for (double s : scales) {
        double worst = 0.0;
        for (std::size_t qi = 0; qi < base_points.size(); ++qi) {
            for (const VecX& w : dirs) {
                VecX x = s * w;
                const double dev = (f(base_points[qi] + x) - fq[qi] - jac[qi] * x).norm() / s;
                worst = std::max(worst, dev);
            }
        }
        tab.scales.push_back(s);
        tab.modulus.push_back(worst);
    }
    return tab;
}

// Fraction of an r-sphere around p that unfolds into the complement within
// the depth budget.  For interior points of the complement the fraction
// tends to 1 as r shrinks.
struct DensityTable {
    std::vector<double> radii;
    std::vector<double> fraction;
};

inline DensityTable density_probe(const SchottkySet& set, const VecX& p, std::vector<double> radii,
                                  int m, int depth = 20) {
    require_valid(set);
    std::sort(radii.begin(), radii.end(), std::greater<double>());
    const std::vector<VecX> dirs = direction_grid(set.n, m);
    DensityTable tab;
    for (double r : radii) {
        std::size_t landed = 0;
        for (const VecX& w : dirs) {
            UnfoldResult u = unfold(set, ExtendedPoint::finite(p + r * w), depth);
            if (u.status == UnfoldStatus::Landed) ++landed;
        }
        tab.radii.push_back(r);
        tab.fraction.push_back(static_cast<double>(landed) / static_cast<double>(dirs.size()));
    }
    return tab;
}

}
