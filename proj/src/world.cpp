#include "navsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "navsim/errors.hpp"
#include "navsim/rng.hpp"

namespace navsim {

namespace {

constexpr double kWall = 0.2;        // wall thickness
constexpr double kNarrowsLen = 3.6;  // length of a sustained wall pinch

void fill_rect(OccupancyGrid& g, double x0, double y0, double x1, double y1) {
    const double res = g.resolution();
    int ix0 = static_cast<int>(std::floor(x0 / res + 1e-9));
    int iy0 = static_cast<int>(std::floor(y0 / res + 1e-9));
    int ix1 = static_cast<int>(std::ceil(x1 / res - 1e-9));
    int iy1 = static_cast<int>(std::ceil(y1 / res - 1e-9));
    g.fill_cells(ix0, iy0, ix1, iy1, true);
}

// Square obstacle centered at (cx, cy).
void place_block(OccupancyGrid& g, double cx, double cy, double side) {
    fill_rect(g, cx - side / 2, cy - side / 2, cx + side / 2, cy + side / 2);
}

// Breadth-first reachability between two points over cells whose obstacle
// clearance exceeds the inflation radius. Used as a generation sanity check;
// the actual global planner lives elsewhere.
bool reachable(const OccupancyGrid& g, Vec2 a, Vec2 b, double inflate) {
    DistanceField df(g);
    const int w = g.width(), h = g.height();
    auto open = [&](int ix, int iy) {
        return ix >= 0 && iy >= 0 && ix < w && iy < h && df.at_cell(ix, iy) > inflate;
    };
    auto [ax, ay] = g.cell_of(a);
    auto [bx, by] = g.cell_of(b);
    if (!open(ax, ay) || !open(bx, by)) return false;
    std::vector<uint8_t> seen(static_cast<size_t>(w) * h, 0);
    std::queue<std::pair<int, int>> q;
    q.push({ax, ay});
    seen[static_cast<size_t>(ay) * w + ax] = 1;
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        if (cx == bx && cy == by) return true;
        for (int k = 0; k < 4; ++k) {
            int nx = cx + dx[k], ny = cy + dy[k];
            if (!open(nx, ny)) continue;
            size_t idx = static_cast<size_t>(ny) * w + nx;
            if (seen[idx]) continue;
            seen[idx] = 1;
            q.push({nx, ny});
        }
    }
    return false;
}

struct CorridorEvent {
    enum class Kind { Gate, WideGate, OffsetGate, Spill, Scatter, Narrows } kind;
    int blocks;  // obstacle budget consumed
};

// Archetype cycles keyed by corridor width; each cycle consumes the
// clutterness budget exactly (budgets are multiples of 4).
std::vector<CorridorEvent> corridor_plan(double width, int clutter) {
    using K = CorridorEvent::Kind;
    std::vector<CorridorEvent> plan;
    int budget = clutter;
    bool narrow = width < 3.5;
    int phase = 0;
    while (budget > 0) {
        CorridorEvent e{K::Scatter, 1};
        if (narrow) {
            switch (phase % 6) {
                case 0: e = {K::Scatter, 1}; break;
                case 1: e = {K::Narrows, 2}; break;
                case 2: e = {K::WideGate, 2}; break;
                case 3: e = {K::Scatter, 1}; break;
                case 4: e = {K::Narrows, 2}; break;
                default: e = {K::Gate, 2}; break;
            }
        } else {
            switch (phase % 4) {
                case 0: e = {K::OffsetGate, 2}; break;
                case 1: e = {K::Spill, 2}; break;
                case 2: e = {K::OffsetGate, 2}; break;
                default: e = {K::Scatter, 1}; break;
            }
        }
        ++phase;
        if (e.blocks > budget) e = {K::Scatter, 1};
        plan.push_back(e);
        budget -= e.blocks;
    }
    // A pinch reaching into the goal pocket would mix deceleration into its
    // signature; keep point events at the corridor's far end instead.
    if (plan.size() > 1 && plan.back().kind == K::Narrows) {
        for (size_t j = plan.size() - 1; j-- > 0;) {
            if (plan[j].kind != K::Narrows) {
                std::swap(plan[j], plan.back());
                break;
            }
        }
    }
    return plan;
}

}  // namespace

CorridorEnv generate_corridor(const EnvironmentSpec& spec) {
    if (spec.corridor_width <= 1.0 || spec.corridor_length <= 6.0)
        throw DomainError("corridor dimensions too small");
    const double res = 0.05;
    const double W = spec.corridor_width, L = spec.corridor_length;
    const double s = spec.obstacle_size;
    const int gw = static_cast<int>(std::lround((L + 2 * kWall) / res));
    const int gh = static_cast<int>(std::lround((W + 2 * kWall) / res));

    OccupancyGrid base(gw, gh, res, false);
    fill_rect(base, 0, 0, L + 2 * kWall, kWall);                       // bottom wall
    fill_rect(base, 0, W + kWall, L + 2 * kWall, W + 2 * kWall);       // top wall
    fill_rect(base, 0, 0, kWall, W + 2 * kWall);                       // left cap
    fill_rect(base, L + kWall, 0, L + 2 * kWall, W + 2 * kWall);       // right cap

    const double yc = kWall + W / 2;
    Pose start{kWall + 1.0, yc, 0.0};
    Pose goal{kWall + L - 1.0, yc, 0.0};

    auto plan = corridor_plan(W, spec.clutterness);
    Rng rng(derive_seed(spec.seed, "corridor"));
    for (int attempt = 0; attempt < 100; ++attempt) {
        OccupancyGrid grid = base;
        const double x_hi = kWall + L - 1.6;
        const size_t n = plan.size();
        // March a cursor down the hall. Every pinch gets the same clear
        // run-up, so planners always reach it settled at cruise rather than
        // in whatever state the previous event left them.
        double cursor = kWall + 0.9;
        bool ok = true;
        for (size_t i = 0; ok && i < n; ++i) {
            using K = CorridorEvent::Kind;
            double x;
            if (plan[i].kind == K::Narrows) {
                x = cursor + 2.6 + kNarrowsLen / 2;
                cursor = x + kNarrowsLen / 2;
            } else {
                x = cursor + 1.1 + rng.uniform(0.0, 0.3);
                cursor = x + 0.3;
            }
            if (cursor > x_hi) {
                ok = false;
                break;
            }
            switch (plan[i].kind) {
                case K::Gate: {
                    // Two stock gap sizes rather than a continuum: every gate
                    // pass then lands on one of a few context signatures and
                    // repeat encounters reinforce instead of smear.
                    double gap = rng.uniform01() < 0.5 ? 0.80 : 0.95;
                    place_block(grid, x, yc - gap / 2 - s / 2, s);
                    place_block(grid, x, yc + gap / 2 + s / 2, s);
                    break;
                }
                case K::WideGate: {
                    // Loose enough that planners keep speed through it, which
                    // is exactly when the braking envelope outruns clearance.
                    double gap = rng.uniform01() < 0.5 ? 1.10 : 1.30;
                    place_block(grid, x, yc - gap / 2 - s / 2, s);
                    place_block(grid, x, yc + gap / 2 + s / 2, s);
                    break;
                }
                case K::OffsetGate: {
                    double gap = rng.uniform(0.95, 1.15);
                    double off = (rng.uniform01() < 0.5 ? -1 : 1) * rng.uniform(0.30, 0.45);
                    place_block(grid, x, yc + off - gap / 2 - s / 2, s);
                    place_block(grid, x, yc + off + gap / 2 + s / 2, s);
                    break;
                }
                case K::Spill: {
                    // Stacked pair protruding from one wall; the remaining
                    // passage forces a close pass for planners that do not
                    // stand off. In wide halls the tip is pinned near the
                    // route so the squeeze still happens.
                    double side = rng.uniform01() < 0.5 ? -1 : 1;
                    double depth = W >= 5.0 ? W / 2 - rng.uniform(0.65, 0.92)
                                            : rng.uniform(1.0, 1.15);
                    double wall_face = side < 0 ? kWall : kWall + W;
                    double y0 = side < 0 ? wall_face : wall_face - depth;
                    double y1 = side < 0 ? wall_face + depth : wall_face;
                    fill_rect(grid, x - s / 2, y0, x + s / 2, y1);
                    break;
                }
                case K::Scatter: {
                    // Near the centerline in tight halls (forces a swing-by),
                    // further out in wide ones.
                    double off = W < 3.5 ? (rng.uniform01() < 0.5 ? 0.20 : 0.35)
                                         : rng.uniform(0.55, 0.85);
                    if (rng.uniform01() < 0.5) off = -off;
                    place_block(grid, x, yc + off, s);
                    break;
                }
                case K::Narrows: {
                    // Sustained pinch: matched wall bumps squeeze the hall to
                    // a chosen width for a few meters, long enough for every
                    // planner to settle into its pace for that width.
                    static const double kWidths[] = {1.0, 1.25, 1.5, 1.9};
                    double wn = kWidths[rng.uniform_int(4)];
                    double intr = (W - wn) / 2;
                    fill_rect(grid, x - kNarrowsLen / 2, kWall,
                              x + kNarrowsLen / 2, kWall + intr);
                    fill_rect(grid, x - kNarrowsLen / 2, kWall + W - intr,
                              x + kNarrowsLen / 2, kWall + W);
                    break;
                }
            }
        }
        if (!ok) throw GenerationFailed("corridor too short for clutterness");
        DistanceField df(grid);
        if (df.sample(start.position()) < 0.5 || df.sample(goal.position()) < 0.5) continue;
        if (!reachable(grid, start.position(), goal.position(), 0.38)) continue;
        return CorridorEnv{std::move(grid), std::move(base), start, goal};
    }
    throw GenerationFailed("corridor generation exhausted retries");
}

namespace {

struct RetailEvent {
    enum class Kind { Constriction, Slalom, Scatter } kind;
    int blocks;
};

// Per-area archetype mix: a round-robin over the three event kinds, offset so
// the two aisles open differently. The clutter budget counts blocks (slalom
// and constriction spend two each).
std::vector<RetailEvent> retail_plan(int count, int phase) {
    using K = RetailEvent::Kind;
    std::vector<RetailEvent> plan;
    int budget = count;
    auto push = [&](K k, int b) {
        if (budget >= b) {
            plan.push_back({k, b});
            budget -= b;
        }
    };
    while (budget > 0) {
        switch (phase % 3) {
            case 0: push(K::Slalom, budget >= 2 ? 2 : 1); break;
            case 1: push(K::Constriction, budget >= 2 ? 2 : 1); break;
            default: push(K::Scatter, 1); break;
        }
        if (plan.back().blocks == 1 && plan.back().kind != K::Scatter)
            plan.back().kind = K::Scatter;
        ++phase;
    }
    return plan;
}

}  // namespace

RetailEnv generate_retail(const EnvironmentSpec& spec) {
    const double res = 0.05;
    const double aw = spec.aisle_width;
    if (aw < 2.0) throw DomainError("aisle width too small");
    const double shelf_h = 1.2;
    const double cross_w = 2.2;
    const double map_w = 25.0;
    const double map_h = 2 * kWall + 4 * aw + 3 * shelf_h;
    const double s = spec.obstacle_size;
    const int gw = static_cast<int>(std::lround(map_w / res));
    const int gh = static_cast<int>(std::lround(map_h / res));

    OccupancyGrid base(gw, gh, res, false);
    fill_rect(base, 0, 0, map_w, kWall);
    fill_rect(base, 0, map_h - kWall, map_w, map_h);
    fill_rect(base, 0, 0, kWall, map_h);
    fill_rect(base, map_w - kWall, 0, map_w, map_h);
    const double shelf_x0 = kWall + cross_w, shelf_x1 = map_w - kWall - cross_w;
    auto aisle_y0 = [&](int i) { return kWall + i * (aw + shelf_h); };
    for (int i = 0; i < 3; ++i) {
        double y0 = aisle_y0(i) + aw;
        fill_rect(base, shelf_x0, y0, shelf_x1, y0 + shelf_h);
    }

    const double a1c = aisle_y0(1) + aw / 2;
    const double a2c = aisle_y0(2) + aw / 2;
    const double left_x = kWall + cross_w / 2;

    RetailEnv env{OccupancyGrid(1, 1, res, false), base, {}, 0, 0, 0, 0, 0, 0};
    env.area_x0 = shelf_x0 + 1.0;
    env.area_x1 = shelf_x1 - 0.3;
    env.area1_y0 = aisle_y0(1);
    env.area1_y1 = aisle_y0(1) + aw;
    env.area2_y0 = aisle_y0(2);
    env.area2_y1 = aisle_y0(2) + aw;

    // Route: west along aisle 1, up the left cross-corridor, east along
    // aisle 2. Two turns; both areas are traversed end to end.
    Pose start{shelf_x1 - 1.2, a1c, kPi};
    std::vector<Pose> wps;
    wps.push_back(start);
    wps.push_back(Pose{left_x, a1c, kPi / 2});
    wps.push_back(Pose{left_x, a2c, 0.0});
    wps.push_back(Pose{shelf_x1 - 1.2, a2c, 0.0});

    Rng rng(derive_seed(spec.seed, "retail"));
    for (int attempt = 0; attempt < 100; ++attempt) {
        OccupancyGrid grid = base;
        // Turn satellites are fixed furniture, outside the clutter budget: one
        // block per aisle at the west (turn) end, hugging the shelf tip the
        // route rounds twice. Corner-cutting planners skim them at speed.
        for (int area = 0; area < 2; ++area) {
            double yc = area == 0 ? a1c : a2c;
            double inner = area == 0 ? 1.0 : -1.0;
            double xe = env.area_x0 + rng.uniform(0.2, 0.8);
            double c = rng.uniform(0.30, 0.42);
            place_block(grid, xe, yc + inner * (c + s / 2), s);
        }
        // The clutter budget is split across the two areas, entry aisle first.
        const int c0 = (spec.clutterness + 1) / 2;
        for (int area = 0; area < 2; ++area) {
            auto plan = retail_plan(area == 0 ? c0 : spec.clutterness - c0, area);
            const double yc = area == 0 ? a1c : a2c;
            // Route direction through the area: aisle 1 is traversed westward,
            // aisle 2 eastward.
            const double dir = area == 0 ? -1.0 : 1.0;
            // Entry-ordered slots: event i sits at increasing distance from
            // where the route enters the aisle. The high-x end of both aisles
            // holds the start (aisle 1) or goal (aisle 2); keep it clear so
            // runs never open or finish jammed against a block.
            const double span_lo = env.area_x0 + 1.2, span_hi = start.x - 2.5;
            const size_t n = plan.size();
            for (size_t i = 0; i < n; ++i) {
                double frac = (i + 0.5) / n;
                double x = dir > 0 ? span_lo + (span_hi - span_lo) * frac
                                   : span_hi - (span_hi - span_lo) * frac;
                x += rng.uniform(-0.2, 0.2);
                using K = RetailEvent::Kind;
                switch (plan[i].kind) {
                    case K::Constriction: {
                        double gap = rng.uniform(1.05, 1.2);
                        place_block(grid, x, yc - gap / 2 - s / 2, s);
                        place_block(grid, x, yc + gap / 2 + s / 2, s);
                        break;
                    }
                    case K::Slalom: {
                        // Staggered pair: a blinder passable at cruise
                        // clearance and a counter-block that punishes
                        // planners without a wide standoff.
                        double sgn = rng.uniform01() < 0.5 ? -1 : 1;
                        double c1 = rng.uniform(0.50, 0.65);
                        double c2 = rng.uniform(0.26, 0.38);
                        double dx = rng.uniform(1.0, 1.4) + s;
                        place_block(grid, x - dir * dx / 2, yc + sgn * (c1 + s / 2), s);
                        place_block(grid, x + dir * dx / 2, yc - sgn * (c2 + s / 2), s);
                        break;
                    }
                    case K::Scatter: {
                        double off = (rng.uniform01() < 0.5 ? -1 : 1) * rng.uniform(0.55, 0.85);
                        place_block(grid, x, yc + off, s);
                        break;
                    }
                }
            }
        }
        DistanceField df(grid);
        bool clear_ends = df.sample(start.position()) >= 0.5 &&
                          df.sample(wps.back().position()) >= 0.5;
        bool connected = clear_ends;
        for (size_t i = 0; connected && i + 1 < wps.size(); ++i)
            connected = reachable(grid, wps[i].position(), wps[i + 1].position(), 0.38);
        if (!connected) continue;
        env.grid = std::move(grid);
        env.waypoints = wps;
        return env;
    }
    throw GenerationFailed("retail generation exhausted retries");
}

double raycast(const OccupancyGrid& grid, Vec2 origin, double angle, double max_range) {
    if (!grid.in_bounds_world(origin)) throw OutOfBounds("raycast origin outside grid");
    auto [ix, iy] = grid.cell_of(origin);
    if (grid.occupied(ix, iy)) return 0.0;
    const double res = grid.resolution();
    const double dx = std::cos(angle), dy = std::sin(angle);
    const int step_x = dx > 0 ? 1 : -1, step_y = dy > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    // Parametric distance to the next cell boundary along each axis.
    double t_max_x = inf, t_max_y = inf, t_dx = inf, t_dy = inf;
    if (std::abs(dx) > 1e-15) {
        double bx = (dx > 0 ? (ix + 1) * res : ix * res);
        t_max_x = (bx - origin.x) / dx;
        t_dx = res / std::abs(dx);
    }
    if (std::abs(dy) > 1e-15) {
        double by = (dy > 0 ? (iy + 1) * res : iy * res);
        t_max_y = (by - origin.y) / dy;
        t_dy = res / std::abs(dy);
    }
    while (true) {
        double t;
        if (t_max_x < t_max_y) {
            t = t_max_x;
            t_max_x += t_dx;
            ix += step_x;
        } else {
            t = t_max_y;
            t_max_y += t_dy;
            iy += step_y;
        }
        if (t >= max_range) return max_range;
        // Leaving the map or entering an occupied cell ends the ray.
        if (grid.occupied(ix, iy)) return t;
    }
}

std::vector<double> lidar_scan(const OccupancyGrid& grid, const Pose& pose,
                               const LidarSpec& lidar, Rng* rng) {
    if (lidar.beam_count <= 0) throw DomainError("beam_count must be positive");
    std::vector<double> ranges(static_cast<size_t>(lidar.beam_count));
    for (int k = 0; k < lidar.beam_count; ++k) {
        double a = pose.theta + lidar.angular_range * k / lidar.beam_count;
        double r = raycast(grid, pose.position(), a, lidar.max_range);
        if (lidar.noise_std > 0.0 && rng)
            r = clamp(r + rng->normal(0.0, lidar.noise_std), 0.0, lidar.max_range);
        ranges[static_cast<size_t>(k)] = r;
    }
    return ranges;
}

}  // namespace navsim
