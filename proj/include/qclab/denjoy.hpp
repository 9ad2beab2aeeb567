#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qclab/geometry.hpp"

namespace qclab {

// ---- torus basics ----------------------------------------------------------

inline double wrap_unit(double x) {
    double y = x - std::floor(x);
    return y >= 1.0 ? 0.0 : y;  // guard the rounding-to-1 edge
}

inline double circle_distance(double a, double b) {
    const double d = wrap_unit(a - b);
    return std::min(d, 1.0 - d);
}

struct TorusChart {
    int n = 2;

    VecX wrap(const VecX& x) const {
        if (static_cast<int>(x.size()) != n) throw ConfigError("torus chart: dimension mismatch");
        VecX y(x.size());
        for (int i = 0; i < x.size(); ++i) y[i] = wrap_unit(x[i]);
        return y;
    }
};

// ---- irrationality surrogate ----------------------------------------------

// Continued-fraction scan: reports the best rational approximation with
// denominator <= max_q.  `rational` is set when that approximation agrees
// with the input to near machine precision.
struct IrrationalityCheck {
    bool rational = false;
    std::int64_t p = 0, q = 1;
    double error = 0.0;
};

inline IrrationalityCheck irrationality_check(double alpha, std::int64_t max_q = 1000000) {
    IrrationalityCheck out;
    double x = alpha;
    std::int64_t h0 = 1, k0 = 0;  // h_{-1}/k_{-1}
    std::int64_t h1 = static_cast<std::int64_t>(std::floor(x)), k1 = 1;
    out.p = h1;
    out.q = 1;
    out.error = std::abs(alpha - static_cast<double>(h1));
    x -= std::floor(x);
    for (int iter = 0; iter < 64; ++iter) {
        if (x < 1e-18) break;
        x = 1.0 / x;
        const double fl = std::floor(x);
        if (fl > 9e18) break;
        const std::int64_t a = static_cast<std::int64_t>(fl);
        x -= fl;
        const std::int64_t h2 = a * h1 + h0;
        const std::int64_t k2 = a * k1 + k0;
        if (k2 > max_q || k2 <= 0) break;
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        const double err = std::abs(alpha - static_cast<double>(h1) / static_cast<double>(k1));
        if (err < out.error || out.q == 1) {
            out.p = h1;
            out.q = k1;
            out.error = err;
        }
        if (err < 1e-14) break;
    }
    out.rational = out.error < 1e-14;
    return out;
}

// Rational-independence surrogate for a translation vector: every coordinate,
// plus every pairwise sum and difference, must evade rationals with
// denominator up to max_q.
struct MinimalityReport {
    bool minimal = true;
    std::vector<std::string> failures;
};

inline MinimalityReport check_minimality(const VecX& rho, std::int64_t max_q = 1000000) {
    MinimalityReport rep;
    auto probe = [&](double v, const std::string& label) {
        IrrationalityCheck c = irrationality_check(v, max_q);
        if (c.rational) {
            rep.minimal = false;
            rep.failures.push_back(label + " is rational within tolerance (" + std::to_string(c.p) + "/" +
                                   std::to_string(c.q) + ")");
        }
    };
    for (int i = 0; i < rho.size(); ++i) probe(rho[i], "component " + std::to_string(i));
    for (int i = 0; i < rho.size(); ++i) {
        for (int j = i + 1; j < rho.size(); ++j) {
            probe(rho[i] - rho[j], "difference " + std::to_string(i) + "-" + std::to_string(j));
            probe(rho[i] + rho[j], "sum " + std::to_string(i) + "+" + std::to_string(j));
        }
    }
    return rep;
}

// ---- Denjoy circle construction --------------------------------------------

enum class WeightRule { Dyadic, InverseSquare };

inline const char* to_string(WeightRule r) {
    return r == WeightRule::Dyadic ? "dyadic" : "inverse_square";
}

inline double weight_of(WeightRule rule, double amplitude, int k) {
    const double ak = static_cast<double>(std::abs(k));
    if (rule == WeightRule::Dyadic) return amplitude * std::pow(2.0, -ak);
    return amplitude / ((ak + 2.0) * (ak + 2.0));
}

// Blow-up of the rotation R_alpha at the orbit points k alpha, |k| <= N.
// Interval I_k replaces the orbit point x_k; f maps I_k affinely onto
// I_{k+1}; off the intervals f conjugates back to the rotation through the
// collapse map h.  The missing I_{N+1} forces a local patch: I_N is sent to
// a short interval carved around the would-be position, and the arc whose
// rotated copy swallows I_{-N} stretches over it.  Those domain intervals
// are reported as truncation artifacts.
struct DenjoyCircle {
    double alpha = 0.0;
    int count = 0;  // N
    WeightRule rule = WeightRule::Dyadic;
    double amplitude = 0.0;
    std::vector<double> lengths;  // l_k at index k + N
    double c = 1.0;               // survives of the Lebesgue measure: 1 - sum(l)
    bool trivial = true;          // all inserted lengths zero

    struct Slot {
        int k = 0;
        double x = 0.0;       // orbit point on the base circle
        double a = 0.0;       // left endpoint of I_k on the blown-up circle
        double b = 0.0;       // right endpoint
        double cum_after = 0.0;  // total inserted length at positions <= x
    };
    std::vector<Slot> slots;                       // sorted by x
    std::vector<int> slot_of_k;                    // index into slots by k + N
    std::vector<double> dom, img;                  // PL breakpoints of f, sorted by dom
    std::vector<std::pair<double, double>> artifacts;  // circular [start, width] domain patches

    double length_of(int k) const { return lengths[static_cast<std::size_t>(k + count)]; }
    double interval_a(int k) const { return slots[static_cast<std::size_t>(slot_of_k[static_cast<std::size_t>(k + count)])].a; }
    double interval_b(int k) const { return slots[static_cast<std::size_t>(slot_of_k[static_cast<std::size_t>(k + count)])].b; }

    // slope of f on I_k, k < N
    double slope(int k) const {
        if (trivial) throw ConfigError("slope: no inserted intervals");
        if (k < -count || k >= count) throw ConfigError("slope: index out of range");
        return length_of(k + 1) / length_of(k);
    }

    double f(double z) const {
        z = wrap_unit(z);
        if (trivial) return wrap_unit(z + alpha);
        const std::size_t M = dom.size();
        std::size_t idx;
        if (z < dom[0] || z >= dom[M - 1]) {
            idx = M - 1;  // wrap segment
        } else {
            idx = static_cast<std::size_t>(std::upper_bound(dom.begin(), dom.end(), z) - dom.begin()) - 1;
        }
        const double u0 = dom[idx], u1 = dom[(idx + 1) % M];
        const double v0 = img[idx], v1 = img[(idx + 1) % M];
        const double du = wrap_unit(u1 - u0) > 0.0 ? wrap_unit(u1 - u0) : 1.0;
        const double dv = wrap_unit(v1 - v0);
        const double t = wrap_unit(z - u0);
        return wrap_unit(v0 + dv * (t / du));
    }

    double h(double z) const {
        z = wrap_unit(z);
        if (trivial) return z;
        // find the last slot with a <= z
        std::size_t lo = 0, hi = slots.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (slots[mid].a <= z)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo == 0) return z / c;  // before the first inserted interval
        const Slot& s = slots[lo - 1];
        if (z <= s.b) return s.x;  // collapsed interval
        return (z - s.cum_after) / c;
    }

    std::pair<double, double> interval(int k) const { return {interval_a(k), interval_b(k)}; }
};

inline DenjoyCircle build_denjoy_circle(double alpha, WeightRule rule, double amplitude, int N) {
    if (N < 0) throw ConfigError("denjoy circle: negative truncation index");
    if (amplitude < 0.0) throw ConfigError("denjoy circle: negative amplitude");
    alpha = wrap_unit(alpha);
    IrrationalityCheck irr = irrationality_check(alpha);
    if (irr.rational)
        throw ConfigError("denjoy circle: rotation number is rational within tolerance (" +
                          std::to_string(irr.p) + "/" + std::to_string(irr.q) + ")");
    DenjoyCircle dc;
    dc.alpha = alpha;
    dc.count = N;
    dc.rule = rule;
    dc.amplitude = amplitude;
    dc.lengths.resize(static_cast<std::size_t>(2 * N + 1));
    double total = 0.0;
    for (int k = -N; k <= N; ++k) {
        const double l = weight_of(rule, amplitude, k);
        dc.lengths[static_cast<std::size_t>(k + N)] = l;
        total += l;
    }
    dc.trivial = total == 0.0;
    if (dc.trivial) {
        dc.c = 1.0;
        return dc;
    }
    if (!(total < 1.0))
        throw ConfigError("denjoy circle: inserted lengths sum to " + std::to_string(total) +
                          ", which does not fit on the circle");
    dc.c = 1.0 - total;

    // orbit slots sorted by base-circle position
    dc.slots.reserve(static_cast<std::size_t>(2 * N + 1));
    for (int k = -N; k <= N; ++k) {
        DenjoyCircle::Slot s;
        s.k = k;
        s.x = wrap_unit(static_cast<double>(k) * alpha);
        dc.slots.push_back(s);
    }
    std::sort(dc.slots.begin(), dc.slots.end(),
              [](const DenjoyCircle::Slot& a, const DenjoyCircle::Slot& b) { return a.x < b.x; });
    double cum = 0.0;
    for (auto& s : dc.slots) {
        s.a = dc.c * s.x + cum;
        cum += dc.length_of(s.k);
        s.b = s.a + dc.length_of(s.k);
        s.cum_after = cum;
    }
    dc.slot_of_k.assign(static_cast<std::size_t>(2 * N + 1), -1);
    for (std::size_t i = 0; i < dc.slots.size(); ++i)
        dc.slot_of_k[static_cast<std::size_t>(dc.slots[i].k + N)] = static_cast<int>(i);

    // position where I_{N+1} would sit
    const double xnext = wrap_unit(static_cast<double>(N + 1) * alpha);
    double cum_before = 0.0;
    for (const auto& s : dc.slots) {
        if (s.x < xnext) cum_before += dc.length_of(s.k);
    }
    const double pstar = dc.c * xnext + cum_before;

    // image breakpoints
    std::vector<std::pair<double, double>> pairs;  // (dom, img)
    std::vector<double> shifted;                   // endpoints of images of I_k, k < N
    for (const auto& s : dc.slots) {
        if (s.k < N) {
            shifted.push_back(dc.interval_a(s.k + 1));
            shifted.push_back(dc.interval_b(s.k + 1));
        }
    }
    std::sort(shifted.begin(), shifted.end());
    double gap_left = 1.0, gap_right = 1.0;
    for (double v : shifted) {
        const double dl = wrap_unit(pstar - v);
        const double dr = wrap_unit(v - pstar);
        if (dl > 0.0) gap_left = std::min(gap_left, dl);
        if (dr > 0.0) gap_right = std::min(gap_right, dr);
    }
    const double lN = dc.length_of(N);
    const double w = 0.5 * std::min({lN, gap_left, gap_right});
    if (!(w > 0.0)) throw InternalError("denjoy circle: no room for the truncation patch");

    for (const auto& s : dc.slots) {
        if (s.k < N) {
            pairs.emplace_back(s.a, dc.interval_a(s.k + 1));
            pairs.emplace_back(s.b, dc.interval_b(s.k + 1));
        } else {
            pairs.emplace_back(s.a, wrap_unit(pstar - 0.5 * w));
            pairs.emplace_back(s.b, wrap_unit(pstar + 0.5 * w));
        }
    }
    std::sort(pairs.begin(), pairs.end());
    dc.dom.reserve(pairs.size());
    dc.img.reserve(pairs.size());
    for (const auto& pr : pairs) {
        dc.dom.push_back(pr.first);
        dc.img.push_back(pr.second);
    }
    // sanity: images must wind exactly once in the same order
    double turn = 0.0;
    for (std::size_t i = 0; i < dc.img.size(); ++i) {
        const double step = wrap_unit(dc.img[(i + 1) % dc.img.size()] - dc.img[i]);
        if (!(step > 0.0)) throw InternalError("denjoy circle: image breakpoints are not in circular order");
        turn += step;
    }
    if (std::abs(turn - 1.0) > 1e-9) throw InternalError("denjoy circle: breakpoint images do not close up");

    // truncation artifacts: I_N, its two neighbouring arcs, and the arc whose
    // image stretches across I_{-N}
    auto arc_after = [&](double from) {
        double best = 1.0;
        for (const auto& s : dc.slots) {
            const double d = wrap_unit(s.a - from);
            if (d > 0.0) best = std::min(best, d);
        }
        return best;
    };
    auto arc_before = [&](double upto) {
        double best = 1.0;
        for (const auto& s : dc.slots) {
            const double d = wrap_unit(upto - s.b);
            if (d > 0.0) best = std::min(best, d);
        }
        return best;
    };
    const double aN = dc.interval_a(N), bN = dc.interval_b(N);
    dc.artifacts.emplace_back(aN, wrap_unit(bN - aN));
    const double left_w = arc_before(aN);
    dc.artifacts.emplace_back(wrap_unit(aN - left_w), left_w);
    dc.artifacts.emplace_back(bN, arc_after(bN));
    const double xprev = wrap_unit(static_cast<double>(-(N + 1)) * alpha);
    // the arc of the blown-up circle holding the image of x_{-N-1}
    double cb = 0.0;
    for (const auto& s : dc.slots)
        if (s.x < xprev) cb += dc.length_of(s.k);
    const double qstar = dc.c * xprev + cb;
    // the arc around qstar: nearest slot end before it, nearest slot start after
    double before = 1.0, after = 1.0;
    for (const auto& s : dc.slots) {
        const double db = wrap_unit(qstar - s.b);
        if (db < before) before = db;
        const double da = wrap_unit(s.a - qstar);
        if (da < after) after = da;
    }
    dc.artifacts.emplace_back(wrap_unit(qstar - before), before + after);
    return dc;
}

inline bool in_circular_interval(double z, double start, double width) {
    return wrap_unit(z - start) <= width;
}

struct DefectReport {
    double max_defect = 0.0;
    double max_off_artifact = 0.0;
    std::size_t grid = 0;
    std::size_t excluded = 0;
};

// Grid scan of dist(h(f(z)), h(z) + alpha) on the circle.
inline DefectReport semiconjugacy_defect(const DenjoyCircle& dc, std::size_t grid) {
    if (grid == 0) throw ConfigError("semiconjugacy_defect: empty grid");
    DefectReport rep;
    rep.grid = grid;
    for (std::size_t j = 0; j < grid; ++j) {
        const double z = (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
        const double lhs = dc.h(dc.f(z));
        const double rhs = wrap_unit(dc.h(z) + dc.alpha);
        const double d = circle_distance(lhs, rhs);
        rep.max_defect = std::max(rep.max_defect, d);
        bool excluded = false;
        for (const auto& ar : dc.artifacts) {
            if (in_circular_interval(z, ar.first, ar.second)) {
                excluded = true;
                break;
            }
        }
        if (excluded) {
            ++rep.excluded;
            continue;
        }
        rep.max_off_artifact = std::max(rep.max_off_artifact, d);
    }
    return rep;
}

struct WanderingReport {
    bool pass = true;
    int first_return = -1;
    int checked = 0;
};

// Tracks the forward images of I_0 and verifies they avoid I_0 itself.
inline WanderingReport wandering_check(const DenjoyCircle& dc, int max_m) {
    if (dc.trivial) throw ConfigError("wandering_check: no inserted intervals");
    WanderingReport rep;
    rep.checked = max_m;
    const double a0 = dc.interval_a(0);
    const double w0 = wrap_unit(dc.interval_b(0) - a0);
    double lo = a0, hi = dc.interval_b(0);
    for (int m = 1; m <= max_m; ++m) {
        lo = dc.f(lo);
        hi = dc.f(hi);
        const double w = wrap_unit(hi - lo);
        const bool overlap = in_circular_interval(lo, a0, w0) || in_circular_interval(a0, lo, w);
        if (overlap) {
            rep.pass = false;
            rep.first_return = m;
            return rep;
        }
    }
    return rep;
}

// ---- round-ball torus scenes ------------------------------------------------

enum class RadiusRule { Harmonic, Constant };

inline const char* to_string(RadiusRule r) {
    return r == RadiusRule::Harmonic ? "harmonic" : "constant";
}

inline double radius_of(RadiusRule rule, double amplitude, int k) {
    if (rule == RadiusRule::Harmonic) return amplitude / (static_cast<double>(std::abs(k)) + 2.0);
    return amplitude;
}

inline double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, static_cast<double>(n) / 2.0) /
           std::tgamma(static_cast<double>(n) / 2.0 + 1.0);
}

// Disjoint round balls along a translation orbit on the unit torus.  Balls
// are shrunk greedily (both members of an offending pair by 0.9) until all
// lifted copies are disjoint with margin 1e-6.
struct RoundDomainScene {
    VecX rho;
    VecX base;
    int count = 0;
    RadiusRule rule = RadiusRule::Harmonic;
    double amplitude = 0.0;
    std::vector<VecX> lift_centers;  // base + k rho in R^n
    std::vector<VecX> centers;       // wrapped to [0,1)^n
    std::vector<double> radii;
    int shrink_count = 0;
};

inline double torus_center_distance(const VecX& a, const VecX& b, bool zero_offset_allowed) {
    const int n = static_cast<int>(a.size());
    std::vector<int> off(static_cast<std::size_t>(n), -1);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        bool all_zero = true;
        for (int i = 0; i < n; ++i)
            if (off[static_cast<std::size_t>(i)] != 0) all_zero = false;
        if (!all_zero || zero_offset_allowed) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = a[i] - b[i] + off[static_cast<std::size_t>(i)];
                s += d * d;
            }
            best = std::min(best, std::sqrt(s));
        }
        int i = 0;
        for (; i < n; ++i) {
            if (off[static_cast<std::size_t>(i)] < 1) {
                off[static_cast<std::size_t>(i)]++;
                break;
            }
            off[static_cast<std::size_t>(i)] = -1;
        }
        if (i == n) break;
    }
    return best;
}

inline RoundDomainScene build_round_scene(VecX rho, VecX base, int N, RadiusRule rule, double amplitude) {
    if (rho.size() != base.size() || rho.size() < 1) throw ConfigError("round scene: bad translation data");
    if (N < 1) throw ConfigError("round scene: need at least one ball");
    if (!(amplitude > 0.0)) throw ConfigError("round scene: amplitude must be positive");
    MinimalityReport mr = check_minimality(rho);
    if (!mr.minimal)
        throw ConfigError("round scene: translation fails the minimality surrogate: " + mr.failures.front());
    const int n = static_cast<int>(rho.size());
    const double wn = unit_ball_volume(n);
    double area = 0.0;
    for (int k = 0; k < N; ++k) area += wn * std::pow(radius_of(rule, amplitude, k), n);
    if (!(area < 1.0))
        throw ConfigError("round scene: requested balls have total volume " + std::to_string(area) +
                          " >= 1, they cannot fit in the unit torus");
    RoundDomainScene sc;
    sc.rho = rho;
    sc.base = base;
    sc.count = N;
    sc.rule = rule;
    sc.amplitude = amplitude;
    TorusChart chart{n};
    for (int k = 0; k < N; ++k) {
        VecX lift = base + static_cast<double>(k) * rho;
        sc.lift_centers.push_back(lift);
        sc.centers.push_back(chart.wrap(lift));
        sc.radii.push_back(radius_of(rule, amplitude, k));
    }
    constexpr double margin = 1e-6;
    for (int round = 0;; ++round) {
        if (round > 200000) throw InternalError("round scene: shrinking failed to converge");
        bool clash = false;
        for (int i = 0; i < N && !clash; ++i) {
            for (int j = i; j < N && !clash; ++j) {
                const double d = torus_center_distance(sc.centers[static_cast<std::size_t>(i)],
                                                       sc.centers[static_cast<std::size_t>(j)], i != j);
                if (d < sc.radii[static_cast<std::size_t>(i)] + sc.radii[static_cast<std::size_t>(j)] + margin) {
                    sc.radii[static_cast<std::size_t>(i)] *= 0.9;
                    sc.radii[static_cast<std::size_t>(j)] *= 0.9;
                    sc.shrink_count++;
                    clash = true;
                }
            }
        }
        if (!clash) break;
    }
    return sc;
}

// ---- similarity fitting (Procrustes with radii) -----------------------------

struct SimilarityFit {
    double lambda = 1.0;
    MatX T;
    VecX a;
    double residual = 0.0;
    bool ok = true;
};

// Least squares over lambda > 0, orthogonal T and translation a for the
// system lambda T c_k + a = c'_k, lambda r_k = r'_k.  Reflections are
// admitted; on rank-deficient covariances the free sign is resolved toward
// the identity.
inline SimilarityFit fit_similarity(const std::vector<VecX>& src_c, const std::vector<double>& src_r,
                                    const std::vector<VecX>& dst_c, const std::vector<double>& dst_r) {
    const std::size_t m = src_c.size();
    if (m < 2 || dst_c.size() != m || src_r.size() != m || dst_r.size() != m)
        throw ConfigError("fit_similarity: need at least two consistent pairs");
    const int n = static_cast<int>(src_c[0].size());
    VecX mean_s = VecX::Zero(n), mean_d = VecX::Zero(n);
    for (std::size_t k = 0; k < m; ++k) {
        mean_s += src_c[k];
        mean_d += dst_c[k];
    }
    mean_s /= static_cast<double>(m);
    mean_d /= static_cast<double>(m);
    MatX cov = MatX::Zero(n, n);
    double denom = 0.0, rdot = 0.0, rsq = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        VecX cs = src_c[k] - mean_s;
        VecX cd = dst_c[k] - mean_d;
        cov += cd * cs.transpose();
        denom += cs.squaredNorm();
        rdot += src_r[k] * dst_r[k];
        rsq += src_r[k] * src_r[k];
    }
    SimilarityFit fit;
    Eigen::JacobiSVD<MatX> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    MatX T = svd.matrixU() * svd.matrixV().transpose();
    const VecX sv = svd.singularValues();
    if (n >= 1 && sv[n - 1] <= 1e-12 * std::max(sv[0], 1e-300)) {
        MatX flip = MatX::Identity(n, n);
        flip(n - 1, n - 1) = -1.0;
        MatX T2 = svd.matrixU() * flip * svd.matrixV().transpose();
        if (T2.trace() > T.trace()) T = T2;
    }
    fit.T = T;
    const double num = (T * cov.transpose()).trace() + rdot;
    const double den = denom + rsq;
    if (!(den > 0.0)) {
        fit.ok = false;
        return fit;
    }
    fit.lambda = std::max(num / den, 1e-300);
    fit.a = mean_d - fit.lambda * (T * mean_s);
    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        worst = std::max(worst, (fit.lambda * (T * src_c[k]) + fit.a - dst_c[k]).norm());
        worst = std::max(worst, std::abs(fit.lambda * src_r[k] - dst_r[k]));
    }
    fit.residual = worst;
    return fit;
}

enum class ObstructionVerdict { SimilarityFits, TheoremWitness, Inconclusive };

inline const char* to_string(ObstructionVerdict v) {
    switch (v) {
        case ObstructionVerdict::SimilarityFits: return "SIMILARITY_FITS";
        case ObstructionVerdict::TheoremWitness: return "THEOREM_WITNESS";
        default: return "INCONCLUSIVE";
    }
}

struct IsometryForcingReport {
    SimilarityFit fit;
    ObstructionVerdict verdict = ObstructionVerdict::Inconclusive;
    bool isometry = false;  // lambda == 1 within 1e-9 when a similarity fits
};

inline IsometryForcingReport isometry_forcing_report(const SimilarityFit& fit) {
    IsometryForcingReport rep;
    rep.fit = fit;
    if (!fit.ok) {
        rep.verdict = ObstructionVerdict::Inconclusive;
        return rep;
    }
    if (fit.residual <= 1e-9) {
        rep.verdict = ObstructionVerdict::SimilarityFits;
        rep.isometry = std::abs(fit.lambda - 1.0) <= 1e-9;
    } else if (fit.residual >= 1e-3) {
        rep.verdict = ObstructionVerdict::TheoremWitness;
    }
    return rep;
}

// Fits one global similarity carrying ball k to ball k+1 for every k at
// once.  A genuine translation orbit with constant radii admits an isometry;
// strictly decreasing radii force a visible residual, which is exactly the
// rigidity the construction is probing.
inline IsometryForcingReport isometry_forcing_check(const std::vector<VecX>& centers,
                                                    const std::vector<double>& radii) {
    if (centers.size() < 3 || centers.size() != radii.size())
        throw ConfigError("isometry_forcing_check: need at least three balls");
    std::vector<VecX> src(centers.begin(), centers.end() - 1);
    std::vector<VecX> dst(centers.begin() + 1, centers.end());
    std::vector<double> sr(radii.begin(), radii.end() - 1);
    std::vector<double> dr(radii.begin() + 1, radii.end());
    return isometry_forcing_report(fit_similarity(src, sr, dst, dr));
}

inline IsometryForcingReport isometry_forcing_check(const RoundDomainScene& sc) {
    return isometry_forcing_check(sc.lift_centers, sc.radii);
}

// ---- volume obstruction ------------------------------------------------------

struct VolumeVerdict {
    double capacity = 0.0;       // V / (omega_n r^n)
    std::uint64_t n_max = 0;     // floor(capacity)
    bool finite = true;
    std::uint64_t demanded = 0;
    bool contradiction = false;
};

inline VolumeVerdict volume_obstruction(int n, double r, double V, std::uint64_t demanded = 0) {
    if (n < 1) throw ConfigError("volume_obstruction: dimension must be positive");
    if (!(V > 0.0)) throw ConfigError("volume_obstruction: volume must be positive");
    if (r < 0.0) throw ConfigError("volume_obstruction: negative radius");
    VolumeVerdict v;
    v.demanded = demanded;
    const double ball = unit_ball_volume(n) * std::pow(r, n);
    if (!(ball > 0.0)) {
        v.finite = false;
        v.capacity = std::numeric_limits<double>::infinity();
        v.n_max = std::numeric_limits<std::uint64_t>::max();
        return v;
    }
    v.capacity = V / ball;
    v.n_max = v.capacity >= 1.8446744073709552e19 ? std::numeric_limits<std::uint64_t>::max()
                                                  : static_cast<std::uint64_t>(std::floor(v.capacity));
    v.contradiction = demanded > 0 && demanded > v.n_max;
    return v;
}

// ---- star discrepancy --------------------------------------------------------

// Box-grid estimate of the star discrepancy of {k rho}, k = 1..K.  The grid
// maximum underestimates the true supremum by at most O(n / cells).
inline double star_discrepancy(const VecX& rho, std::int64_t K, int cells_per_dim = 64) {
    const int n = static_cast<int>(rho.size());
    if (n < 1 || K < 1) throw ConfigError("star_discrepancy: bad arguments");
    int g = cells_per_dim;
    while (g > 2 && std::pow(static_cast<double>(g), n) > 4.2e6) g /= 2;
    std::size_t cells = 1;
    for (int i = 0; i < n; ++i) cells *= static_cast<std::size_t>(g);
    std::vector<double> acc(cells, 0.0);
    for (std::int64_t k = 1; k <= K; ++k) {
        std::size_t idx = 0, stride = 1;
        for (int i = 0; i < n; ++i) {
            const double x = wrap_unit(static_cast<double>(k) * rho[i]);
            std::size_t ci = static_cast<std::size_t>(x * g);
            if (ci >= static_cast<std::size_t>(g)) ci = static_cast<std::size_t>(g) - 1;
            idx += ci * stride;
            stride *= static_cast<std::size_t>(g);
        }
        acc[idx] += 1.0;
    }
    // inclusive prefix sums along each axis
    std::size_t stride = 1;
    for (int i = 0; i < n; ++i) {
        for (std::size_t base = 0; base < cells; ++base) {
            const std::size_t coord = (base / stride) % static_cast<std::size_t>(g);
            if (coord > 0) acc[base] += acc[base - stride];
        }
        stride *= static_cast<std::size_t>(g);
    }
    double worst = 0.0;
    for (std::size_t idx = 0; idx < cells; ++idx) {
        double vol = 1.0;
        std::size_t rest = idx;
        for (int i = 0; i < n; ++i) {
            const std::size_t coord = rest % static_cast<std::size_t>(g);
            rest /= static_cast<std::size_t>(g);
            vol *= static_cast<double>(coord + 1) / static_cast<double>(g);
        }
        worst = std::max(worst, std::abs(acc[idx] / static_cast<double>(K) - vol));
    }
    return worst;
}

}
