#include "navsim/global_plan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "navsim/errors.hpp"

namespace navsim {

std::size_t GlobalPath::nearest(Vec2 p) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        double d = (points[i] - p).norm();
        if (d < best_d - 1e-12) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

Vec2 GlobalPath::point_at(double s) const {
    if (points.empty()) return {};
    if (s <= 0.0) return points.front();
    if (s >= length()) return points.back();
    auto it = std::upper_bound(arclen.begin(), arclen.end(), s);
    std::size_t i = static_cast<std::size_t>(it - arclen.begin());
    double seg = arclen[i] - arclen[i - 1];
    double f = seg > 0 ? (s - arclen[i - 1]) / seg : 0.0;
    return points[i - 1] + (points[i] - points[i - 1]) * f;
}

namespace {

bool segment_clear(const DistanceField& df, Vec2 a, Vec2 b, double inflate) {
    double len = (b - a).norm();
    int n = std::max(1, static_cast<int>(std::ceil(len / (df.resolution() * 0.5))));
    for (int i = 0; i <= n; ++i) {
        Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
        if (df.sample(p) <= inflate) return false;
    }
    return true;
}

std::vector<Vec2> astar_cells(const OccupancyGrid& grid, const DistanceField& df,
                              Vec2 start, Vec2 goal, double inflate) {
    const int w = grid.width(), h = grid.height();
    auto open_cell = [&](int ix, int iy) {
        return ix >= 0 && iy >= 0 && ix < w && iy < h && df.at_cell(ix, iy) > inflate;
    };
    auto [sx, sy] = grid.cell_of(start);
    auto [gx, gy] = grid.cell_of(goal);
    if (!open_cell(sx, sy)) throw NoPath("start is blocked");
    if (!open_cell(gx, gy)) throw NoPath("goal is blocked");

    const double kSqrt2 = std::sqrt(2.0);
    auto octile = [&](int ix, int iy) {
        double dx = std::abs(ix - gx), dy = std::abs(iy - gy);
        return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
    };
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> g_cost(n, std::numeric_limits<double>::infinity());
    std::vector<int32_t> parent(n, -1);
    struct Node {
        double f;
        int idx;
        bool operator<(const Node& o) const { return f > o.f; }
    };
    std::priority_queue<Node> open;
    auto idx_of = [&](int ix, int iy) { return static_cast<std::size_t>(iy) * w + ix; };
    std::size_t s_idx = idx_of(sx, sy), g_idx = idx_of(gx, gy);
    g_cost[s_idx] = 0.0;
    open.push({octile(sx, sy), static_cast<int>(s_idx)});
    const int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!open.empty()) {
        Node top = open.top();
        open.pop();
        std::size_t cur = static_cast<std::size_t>(top.idx);
        if (cur == g_idx) break;
        int cx = static_cast<int>(cur % w), cy = static_cast<int>(cur / w);
        if (top.f > g_cost[cur] + octile(cx, cy) + 1e-9) continue;  // stale entry
        for (int k = 0; k < 8; ++k) {
            int nx = cx + dx8[k], ny = cy + dy8[k];
            if (!open_cell(nx, ny)) continue;
            // Forbid diagonal moves that cut a blocked corner.
            if (k >= 4 && (!open_cell(cx, ny) || !open_cell(nx, cy))) continue;
            double step = k < 4 ? 1.0 : kSqrt2;
            std::size_t ni = idx_of(nx, ny);
            double ng = g_cost[cur] + step;
            if (ng < g_cost[ni] - 1e-12) {
                g_cost[ni] = ng;
                parent[ni] = static_cast<int32_t>(cur);
                open.push({ng + octile(nx, ny), static_cast<int>(ni)});
            }
        }
    }
    if (!std::isfinite(g_cost[g_idx])) throw NoPath("no route between endpoints");
    std::vector<Vec2> cells;
    for (int32_t i = static_cast<int32_t>(g_idx); i >= 0; i = parent[static_cast<std::size_t>(i)])
        cells.push_back(grid.center_of(i % w, i / w));
    std::reverse(cells.begin(), cells.end());
    cells.front() = start;
    cells.back() = goal;
    return cells;
}

void append_resampled(GlobalPath& path, const std::vector<Vec2>& verts, double max_step) {
    if (verts.empty()) return;
    if (path.points.empty()) {
        path.points.push_back(verts[0]);
        path.arclen.push_back(0.0);
    }
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
        Vec2 a = verts[i], b = verts[i + 1];
        double len = (b - a).norm();
        if (len < 1e-12) continue;
        int steps = std::max(1, static_cast<int>(std::ceil(len / max_step)));
        for (int k = 1; k <= steps; ++k) {
            Vec2 p = a + (b - a) * (static_cast<double>(k) / steps);
            double d = (p - path.points.back()).norm();
            if (d < 1e-12) continue;
            path.points.push_back(p);
            path.arclen.push_back(path.arclen.back() + d);
        }
    }
}

}  // namespace

GlobalPath plan_path(const OccupancyGrid& grid, Vec2 start, Vec2 goal, double inflate) {
    DistanceField df(grid);
    auto cells = astar_cells(grid, df, start, goal, inflate);
    // Greedy line-of-sight shortcut.
    std::vector<Vec2> verts;
    std::size_t i = 0;
    verts.push_back(cells[0]);
    while (i + 1 < cells.size()) {
        std::size_t j = cells.size() - 1;
        while (j > i + 1 && !segment_clear(df, cells[i], cells[j], inflate)) --j;
        verts.push_back(cells[j]);
        i = j;
    }
    GlobalPath path;
    append_resampled(path, verts, 2.0 * grid.resolution());
    return path;
}

GlobalPath plan_route(const OccupancyGrid& grid, const std::vector<Vec2>& waypoints,
                      double inflate) {
    if (waypoints.size() < 2) throw DomainError("route needs at least two waypoints");
    DistanceField df(grid);
    GlobalPath path;
    for (std::size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
        auto cells = astar_cells(grid, df, waypoints[leg], waypoints[leg + 1], inflate);
        std::vector<Vec2> verts;
        std::size_t i = 0;
        verts.push_back(cells[0]);
        while (i + 1 < cells.size()) {
            std::size_t j = cells.size() - 1;
            while (j > i + 1 && !segment_clear(df, cells[i], cells[j], inflate)) --j;
            verts.push_back(cells[j]);
            i = j;
        }
        append_resampled(path, verts, 2.0 * grid.resolution());
    }
    return path;
}

}  // namespace navsim
