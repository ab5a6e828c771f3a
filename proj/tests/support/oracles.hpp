#pragma once

// Brute-force reference implementations the tests compare the library
// against. Everything here trades speed for obviousness and stays
// independent of the code under test: no csgad algorithm internals, no
// Eigen, just loops over the definitions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csgad/events.hpp"

namespace oracle {

// Ordered (center, context) pair counts within a symmetric window, by
// scanning every walk position against every offset. counts[i*vocab + j].
inline std::vector<std::int64_t> cooccurrence(
    const std::vector<std::vector<std::uint32_t>>& walks, std::size_t vocab, int context) {
    std::vector<std::int64_t> counts(vocab * vocab, 0);
    for (const auto& walk : walks) {
        const int len = static_cast<int>(walk.size());
        for (int i = 0; i < len; ++i)
            for (int off = -context; off <= context; ++off) {
                if (off == 0) continue;
                const int j = i + off;
                if (j < 0 || j >= len) continue;
                counts[walk[i] * vocab + walk[j]] += 1;
            }
    }
    return counts;
}

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

// Minimum distance from points[self] to any other listed member.
inline double nearest_neighbor(const std::vector<std::vector<double>>& points,
                               const std::vector<std::size_t>& members, std::size_t self) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : members) {
        if (m == self) continue;
        best = std::min(best, euclidean(points[self], points[m]));
    }
    return best;
}

// Dense adjacency straight from the event list: user-action and
// action-service edges accumulate one unit per event inside
// [t_start, t_end). Node order is first appearance per partition,
// global order [users | actions | services].
struct DenseGraph {
    std::vector<std::string> users, actions, services;
    std::vector<std::int64_t> adj;  // row-major over node_count()

    std::size_t node_count() const { return users.size() + actions.size() + services.size(); }
    std::int64_t at(std::size_t i, std::size_t j) const { return adj[i * node_count() + j]; }
};

inline DenseGraph dense_graph(const std::vector<csgad::AuditEvent>& events,
                              std::int64_t t_start, std::int64_t t_end) {
    DenseGraph g;
    auto index_of = [](std::vector<std::string>& names, const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        names.push_back(name);
        return names.size() - 1;
    };
    struct Hit {
        std::size_t u, a, s;
    };
    std::vector<Hit> hits;
    for (const auto& e : events) {
        if (e.timestamp < t_start || e.timestamp >= t_end) continue;
        hits.push_back({index_of(g.users, e.user_id),
                        index_of(g.actions, std::string(csgad::to_string(e.category))),
                        index_of(g.services, e.service)});
    }
    const std::size_t n = g.node_count();
    g.adj.assign(n * n, 0);
    for (const auto& h : hits) {
        const std::size_t u = h.u;
        const std::size_t a = g.users.size() + h.a;
        const std::size_t s = g.users.size() + g.actions.size() + h.s;
        g.adj[u * n + a] += 1;
        g.adj[a * n + u] += 1;
        g.adj[a * n + s] += 1;
        g.adj[s * n + a] += 1;
    }
    return g;
}

// One-sided Jacobi SVD of a dense column-major-free (row-major) m x n
// matrix with m >= 1, n >= 1. Returns singular values descending along
// with the corresponding left singular vectors (m x rank columns).
// Plain textbook sweeps; O(n^2 m) per sweep, fine for test sizes.
struct Svd {
    std::vector<double> singulars;       // descending
    std::vector<std::vector<double>> u;  // u[k] is the k-th left vector, size m
};

inline Svd jacobi_svd(std::vector<double> a, std::size_t m, std::size_t n) {
    auto col = [&](std::size_t j, std::size_t i) -> double& { return a[i * n + j]; };
    const double eps = 1e-14;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    app += col(p, i) * col(p, i);
                    aqq += col(q, i) * col(q, i);
                    apq += col(p, i) * col(q, i);
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double vp = col(p, i), vq = col(q, i);
                    col(p, i) = c * vp - s * vq;
                    col(q, i) = s * vp + c * vq;
                }
            }
        if (!rotated) break;
    }
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) norm += col(j, i) * col(j, i);
        order.emplace_back(std::sqrt(norm), j);
    }
    std::sort(order.begin(), order.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    Svd out;
    for (const auto& [sigma, j] : order) {
        out.singulars.push_back(sigma);
        std::vector<double> vec(m, 0.0);
        if (sigma > 1e-12)
            for (std::size_t i = 0; i < m; ++i) vec[i] = col(j, i) / sigma;
        out.u.push_back(std::move(vec));
    }
    return out;
}

}  // namespace oracle
