#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "juliadim/sphere.hpp"

namespace juliadim {

/// Nearest-neighbor queries in the chordal metric. Points are embedded on
/// the unit sphere in R^3, where chordal distance is plain Euclidean
/// distance, and hashed into a cubic grid. Pick the cell size near the
/// expected answer scale; queries scan expanding shells of cells.
class ChordalIndex {
public:
    explicit ChordalIndex(std::span<const SpherePoint> points,
                          double cell = 0.02)
        : cell_(cell) {
        pts_.reserve(points.size());
        for (const SpherePoint& p : points) {
            const auto e = sphere_embed(p);
            pts_.push_back(e);
            cells_[key(coord(e[0]), coord(e[1]), coord(e[2]))].push_back(
                int(pts_.size()) - 1);
        }
    }

    size_t size() const { return pts_.size(); }

    /// Distance to the nearest indexed point; +infinity when empty.
    double nearest(const SpherePoint& q) const { return nearest_with_index(q).first; }

    std::pair<double, int> nearest_with_index(const SpherePoint& q) const {
        if (pts_.empty())
            return {std::numeric_limits<double>::infinity(), -1};
        const auto e = sphere_embed(q);
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        // after completing shells 0..K every point within (K-1)*cell has
        // been examined
        for (int k = 0;; ++k) {
            scan_shell(e, k, best, arg, -1.0);
            const double covered = (k - 1) * cell_;
            if (best <= covered || covered > 2.01) return {best, arg};
        }
    }

    bool within(const SpherePoint& q, double eps) const {
        if (pts_.empty()) return false;
        const auto e = sphere_embed(q);
        const int kmax = int(std::ceil(eps / cell_)) + 1;
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int k = 0; k <= kmax; ++k) {
            scan_shell(e, k, best, arg, eps);
            if (best <= eps) return true;
        }
        return false;
    }

private:
    using Key = std::uint64_t;

    double cell_;
    std::vector<std::array<double, 3>> pts_;
    std::unordered_map<Key, std::vector<int>> cells_;

    int coord(double x) const { return int(std::floor(x / cell_)) + (1 << 16); }

    static Key key(int a, int b, int c) {
        return (Key(std::uint32_t(a)) << 42) ^ (Key(std::uint32_t(b)) << 21) ^
               Key(std::uint32_t(c));
    }

    void check_cell(int a, int b, int c, const std::array<double, 3>& e,
                    double& best, int& arg) const {
        const auto it = cells_.find(key(a, b, c));
        if (it == cells_.end()) return;
        for (int idx : it->second) {
            const auto& p = pts_[size_t(idx)];
            const double d2 = (p[0] - e[0]) * (p[0] - e[0]) +
                              (p[1] - e[1]) * (p[1] - e[1]) +
                              (p[2] - e[2]) * (p[2] - e[2]);
            if (d2 < best * best) {
                best = std::sqrt(d2);
                arg = idx;
            }
        }
    }

    // cells at Chebyshev distance exactly k from q's cell
    void scan_shell(const std::array<double, 3>& e, int k, double& best,
                    int& arg, double early) const {
        const int cx = coord(e[0]), cy = coord(e[1]), cz = coord(e[2]);
        if (k == 0) {
            check_cell(cx, cy, cz, e, best, arg);
            return;
        }
        for (int dx = -k; dx <= k; ++dx)
            for (int dy = -k; dy <= k; ++dy) {
                const bool face = std::abs(dx) == k || std::abs(dy) == k;
                for (int dz = -k; dz <= k; dz += (face ? 1 : 2 * k)) {
                    check_cell(cx + dx, cy + dy, cz + dz, e, best, arg);
                    if (early > 0.0 && best <= early) return;
                }
            }
    }
};

} // namespace juliadim
