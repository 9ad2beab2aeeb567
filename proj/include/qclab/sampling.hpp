#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "qclab/geometry.hpp"

namespace qclab {

// Deterministic unit-direction grids.  n = 2 uses m equally spaced angles
// (so axis directions are hit exactly when 4 | m); n = 3 a Fibonacci sphere;
// higher dimensions a fixed-seed Gaussian cloud, normalized.
inline std::vector<VecX> direction_grid(int n, int m) {
    if (n < 1 || m < 1) throw ConfigError("direction_grid: bad arguments");
    std::vector<VecX> dirs;
    if (n == 1) {
        dirs.push_back(VecX::Constant(1, 1.0));
        dirs.push_back(VecX::Constant(1, -1.0));
        return dirs;
    }
    dirs.reserve(static_cast<std::size_t>(m));
    if (n == 2) {
        for (int j = 0; j < m; ++j) {
            const double t = 2.0 * std::numbers::pi * j / m;
            VecX d(2);
            d << std::cos(t), std::sin(t);
            dirs.push_back(std::move(d));
        }
        return dirs;
    }
    if (n == 3) {
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int j = 0; j < m; ++j) {
            const double z = 1.0 - 2.0 * (j + 0.5) / m;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = 2.0 * std::numbers::pi * j / golden;
            VecX d(3);
            d << rho * std::cos(phi), rho * std::sin(phi), z;
            dirs.push_back(std::move(d));
        }
        return dirs;
    }
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(n) << 32) ^ static_cast<std::uint64_t>(m));
    std::normal_distribution<double> gauss;
    for (int j = 0; j < m; ++j) {
        VecX d(n);
        double nn = 0.0;
        do {
            for (int i = 0; i < n; ++i) d[i] = gauss(rng);
            nn = d.norm();
        } while (nn < 1e-8);
        dirs.push_back(d / nn);
    }
    return dirs;
}

inline int thread_count_from_env() {
    const char* v = std::getenv("QCLAB_THREADS");
    if (!v) return 1;
    const int k = std::atoi(v);
    if (k < 1) return 1;
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    return hw > 0 ? std::min(k, hw) : k;
}

// Index-parallel loop with deterministic result placement: the worker writes
// by index, so outputs are independent of the schedule.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int threads = thread_count_from_env();
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}
