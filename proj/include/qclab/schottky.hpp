#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qclab/geometry.hpp"

namespace qclab {

// Complement data of a Schottky set: at least three pairwise disjoint open
// round balls removed from R^n (infinity always survives in the complement).
struct SchottkySet {
    int n = 2;
    std::vector<Ball> removed;
    std::string label;

    int count() const { return static_cast<int>(removed.size()); }
    const Sphere& mirror(int i) const { return removed[static_cast<std::size_t>(i)].sphere; }
};

// Strict disjointness margin demanded between removed balls, and the band
// around each peripheral sphere whose points are classified as complement.
inline constexpr double kDisjointnessGap = 1e-12;
inline constexpr double kSurfaceBand = 1e-12;

struct ValidationIssue {
    int i = -1, j = -1;
    std::string what;
};

struct ValidationReport {
    bool valid = true;
    double min_gap = std::numeric_limits<double>::infinity();
    std::vector<ValidationIssue> issues;

    std::string message() const {
        if (valid) return "valid";
        std::string s;
        for (const auto& it : issues) {
            if (!s.empty()) s += "; ";
            s += it.what;
        }
        return s;
    }
};

inline ValidationReport validate(const SchottkySet& set) {
    ValidationReport rep;
    if (set.count() < 3) {
        rep.valid = false;
        rep.issues.push_back({-1, -1, "at least three removed balls are required"});
    }
    for (int i = 0; i < set.count(); ++i) {
        const Ball& b = set.removed[static_cast<std::size_t>(i)];
        if (!b.bounded()) {
            rep.valid = false;
            rep.issues.push_back({i, -1, "removed ball " + std::to_string(i) + " is not a bounded ball"});
            continue;
        }
        if (b.dim() != set.n) {
            rep.valid = false;
            rep.issues.push_back({i, -1, "removed ball " + std::to_string(i) + " has wrong dimension"});
        }
    }
    if (!rep.valid) return rep;
    for (int i = 0; i < set.count(); ++i) {
        for (int j = i + 1; j < set.count(); ++j) {
            const Ball& a = set.removed[static_cast<std::size_t>(i)];
            const Ball& b = set.removed[static_cast<std::size_t>(j)];
            const double gap = (a.center() - b.center()).norm() - a.radius() - b.radius();
            rep.min_gap = std::min(rep.min_gap, gap);
            if (!(gap > kDisjointnessGap)) {
                rep.valid = false;
                rep.issues.push_back({i, j, "balls " + std::to_string(i) + " and " + std::to_string(j) +
                                                " are not strictly disjoint (gap " + std::to_string(gap) + ")"});
            }
        }
    }
    return rep;
}

inline void require_valid(const SchottkySet& set) {
    ValidationReport rep = validate(set);
    if (!rep.valid) throw ConfigError("invalid ball configuration: " + rep.message());
}

// Word in the free product of the peripheral reflections.  Reduced means no
// letter repeats immediately (each reflection is an involution).
struct ReflectionWord {
    std::vector<int> letters;

    int length() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }

    bool reduced() const {
        for (std::size_t i = 1; i < letters.size(); ++i)
            if (letters[i] == letters[i - 1]) return false;
        return true;
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < letters.size(); ++i) {
            if (i) s += '-';
            s += std::to_string(letters[i]);
        }
        return s;
    }
};

inline std::uint64_t reduced_word_count(int m, int len) {
    if (len == 0) return 1;
    std::uint64_t c = static_cast<std::uint64_t>(m);
    for (int i = 1; i < len; ++i) c *= static_cast<std::uint64_t>(m - 1);
    return c;
}

// All reduced words of length <= max_len, ordered by (length, lexicographic).
inline std::vector<ReflectionWord> enumerate_words(int m, int max_len) {
    if (m < 1 || max_len < 0) throw ConfigError("enumerate_words: bad arguments");
    std::vector<ReflectionWord> out;
    std::vector<std::vector<int>> level{{}};
    out.push_back(ReflectionWord{});
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::vector<int>> next;
        next.reserve(level.size() * static_cast<std::size_t>(m));
        for (const auto& w : level) {
            for (int a = 0; a < m; ++a) {
                if (!w.empty() && w.back() == a) continue;
                std::vector<int> ext = w;
                ext.push_back(a);
                next.push_back(std::move(ext));
            }
        }
        // Lexicographic order is inherited: parents are lex-sorted and the
        // appended letters increase, but sort anyway to keep the contract
        // independent of the construction.
        std::sort(next.begin(), next.end());
        for (auto& w : next) out.push_back(ReflectionWord{w});
        level = std::move(next);
    }
    return out;
}

// gamma_{w_1} . gamma_{w_2} ... gamma_{w_k} (x): last letter acts first.
inline ExtendedPoint apply_word(const SchottkySet& set, const ReflectionWord& word, ExtendedPoint x) {
    for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
        if (*it < 0 || *it >= set.count()) throw ConfigError("apply_word: letter out of range");
        x = invert(set.mirror(*it), x);
    }
    return x;
}

// Image ball gamma_w(B_source).  Each orbit ball of depth k >= 1 nests
// strictly inside the depth-(k-1) ball whose word drops the last letter and
// whose source is that letter.
struct OrbitBall {
    ReflectionWord word;
    int source = 0;
    Ball ball;
    int depth = 0;
};

struct OrbitPacking {
    std::vector<OrbitBall> balls;
    std::vector<double> max_radius_per_depth;
    std::vector<std::size_t> count_per_depth;
};

inline OrbitPacking orbit_packing(const SchottkySet& set, int depth) {
    require_valid(set);
    if (depth < 0) throw ConfigError("orbit_packing: negative depth");
    OrbitPacking out;
    out.max_radius_per_depth.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    out.count_per_depth.assign(static_cast<std::size_t>(depth) + 1, 0);
    const int m = set.count();
    std::vector<ReflectionWord> words = enumerate_words(m, depth);
    for (const auto& w : words) {
        const int k = w.length();
        for (int j = 0; j < m; ++j) {
            if (!w.empty() && w.letters.back() == j) continue;
            Ball img = set.removed[static_cast<std::size_t>(j)];
            for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
                img = image_of_ball(set.mirror(*it), img);
            out.max_radius_per_depth[static_cast<std::size_t>(k)] =
                std::max(out.max_radius_per_depth[static_cast<std::size_t>(k)], img.radius());
            out.count_per_depth[static_cast<std::size_t>(k)]++;
            out.balls.push_back(OrbitBall{w, j, std::move(img), k});
        }
    }
    return out;
}

inline int largest_ball_index(const SchottkySet& set) {
    if (set.removed.empty()) throw ConfigError("largest_ball_index: empty set");
    int best = 0;
    for (int i = 1; i < set.count(); ++i) {
        if (set.removed[static_cast<std::size_t>(i)].radius() >
            set.removed[static_cast<std::size_t>(best)].radius())
            best = i;
    }
    return best;  // ties keep the lowest index
}

// Doubling across the peripheral sphere of ball i: the removed family becomes
// the other balls together with their mirror images inside B_i.
inline SchottkySet double_across(const SchottkySet& set, int i) {
    require_valid(set);
    if (i < 0 || i >= set.count()) throw ConfigError("double_across: index out of range");
    SchottkySet out;
    out.n = set.n;
    out.label = set.label.empty() ? "doubled" : set.label + " doubled";
    for (int j = 0; j < set.count(); ++j)
        if (j != i) out.removed.push_back(set.removed[static_cast<std::size_t>(j)]);
    for (int j = 0; j < set.count(); ++j)
        if (j != i) out.removed.push_back(image_of_ball(set.mirror(i), set.removed[static_cast<std::size_t>(j)]));
    ValidationReport rep = validate(out);
    if (!rep.valid) throw InternalError("double_across produced an invalid configuration: " + rep.message());
    return out;
}

inline SchottkySet double_across_largest(const SchottkySet& set) {
    return double_across(set, largest_ball_index(set));
}

enum class UnfoldStatus { Landed, DepthCapped };

struct UnfoldResult {
    ReflectionWord word;  // outermost letter first; reconstruct x by applying it to terminal
    ExtendedPoint terminal;
    UnfoldStatus status = UnfoldStatus::Landed;
    int capped_ball = -1;
};

// Reflects x out of whichever removed ball contains it until it lands in the
// complement or the depth budget runs out.  Points within kSurfaceBand of a
// peripheral sphere count as complement.  The resulting word is reduced
// automatically: a reflection moves the point out of its own ball.
inline UnfoldResult unfold(const SchottkySet& set, ExtendedPoint x, int max_depth = 20) {
    if (max_depth < 0) throw ConfigError("unfold: negative depth budget");
    UnfoldResult res;
    for (;;) {
        int inside = -1;
        if (!x.infinite) {
            for (int j = 0; j < set.count(); ++j) {
                const Ball& b = set.removed[static_cast<std::size_t>(j)];
                if (b.sphere.surface_gap(x.coords) < -kSurfaceBand) {
                    inside = j;
                    break;
                }
            }
        }
        if (inside < 0) {
            res.terminal = std::move(x);
            res.status = UnfoldStatus::Landed;
            return res;
        }
        if (res.word.length() >= max_depth) {
            res.terminal = std::move(x);
            res.status = UnfoldStatus::DepthCapped;
            res.capped_ball = inside;
            return res;
        }
        const Sphere& s = set.mirror(inside);
        if ((x.coords - s.center).squaredNorm() == 0.0)
            throw EvaluationError("unfold: point coincides with the center of ball " + std::to_string(inside) +
                                  "; perturb it by about 1e-9 and retry");
        x = invert(s, x);
        res.word.letters.push_back(inside);
    }
}

}
