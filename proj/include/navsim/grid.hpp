#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "navsim/geometry.hpp"

namespace navsim {

// Axis-aligned occupancy grid. World origin (0,0) is the outer corner of
// cell (0,0); cell (ix, iy) covers [ix*res, (ix+1)*res) x [iy*res, (iy+1)*res)
// with iy = 0 at the bottom. Anything outside the grid counts as occupied.
//
// Text format (.grid): first line "width_cells height_cells resolution",
// then height_cells rows of '#' (occupied) / '.' (free), top row first.
class OccupancyGrid {
  public:
    OccupancyGrid(int width_cells, int height_cells, double resolution,
                  bool occupied = false);

    static OccupancyGrid load(const std::string& path);
    static OccupancyGrid parse(const std::string& text);
    void save(const std::string& path) const;
    std::string serialize() const;

    int width() const { return w_; }
    int height() const { return h_; }
    double resolution() const { return res_; }
    double world_width() const { return w_ * res_; }
    double world_height() const { return h_ * res_; }

    bool in_bounds(int ix, int iy) const {
        return ix >= 0 && iy >= 0 && ix < w_ && iy < h_;
    }
    bool in_bounds_world(Vec2 p) const {
        return p.x >= 0.0 && p.y >= 0.0 && p.x < w_ * res_ && p.y < h_ * res_;
    }
    bool occupied(int ix, int iy) const {
        return !in_bounds(ix, iy) || cells_[static_cast<std::size_t>(iy) * w_ + ix] != 0;
    }
    void set(int ix, int iy, bool occ);
    // Half-open cell ranges, clipped to the grid.
    void fill_cells(int ix0, int iy0, int ix1, int iy1, bool occ);

    bool occupied_at(Vec2 p) const;
    std::pair<int, int> cell_of(Vec2 p) const {
        return {static_cast<int>(std::floor(p.x / res_)),
                static_cast<int>(std::floor(p.y / res_))};
    }
    Vec2 center_of(int ix, int iy) const {
        return {(ix + 0.5) * res_, (iy + 0.5) * res_};
    }

    std::size_t count_occupied() const;

  private:
    int w_;
    int h_;
    double res_;
    std::vector<uint8_t> cells_;
};

// Exact Euclidean distance (meters) from each cell center to the nearest
// occupied cell center, computed once per immutable grid with the two-pass
// lower-envelope transform. Serves the collision predicate, clearance
// scoring, repulsion gradients and path inflation.
class DistanceField {
  public:
    explicit DistanceField(const OccupancyGrid& grid);

    double at_cell(int ix, int iy) const {
        if (ix < 0 || iy < 0 || ix >= w_ || iy >= h_) return 0.0;
        return d_[static_cast<std::size_t>(iy) * w_ + ix];
    }
    // Bilinear interpolation between cell centers; outside the grid -> 0.
    double sample(Vec2 p) const;
    // Central-difference gradient of sample(); points away from obstacles.
    Vec2 gradient(Vec2 p) const;
    double resolution() const { return res_; }

  private:
    int w_;
    int h_;
    double res_;
    std::vector<double> d_;
};

}  // namespace navsim
