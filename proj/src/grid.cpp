#include "navsim/grid.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "navsim/errors.hpp"

namespace navsim {

OccupancyGrid::OccupancyGrid(int width_cells, int height_cells, double resolution,
                             bool occupied)
    : w_(width_cells), h_(height_cells), res_(resolution) {
    if (w_ <= 0 || h_ <= 0 || !(res_ > 0.0))
        throw DomainError("grid dimensions and resolution must be positive");
    cells_.assign(static_cast<std::size_t>(w_) * h_, occupied ? 1 : 0);
}

void OccupancyGrid::set(int ix, int iy, bool occ) {
    if (!in_bounds(ix, iy)) throw OutOfBounds("cell index outside grid");
    cells_[static_cast<std::size_t>(iy) * w_ + ix] = occ ? 1 : 0;
}

void OccupancyGrid::fill_cells(int ix0, int iy0, int ix1, int iy1, bool occ) {
    ix0 = std::max(ix0, 0);
    iy0 = std::max(iy0, 0);
    ix1 = std::min(ix1, w_);
    iy1 = std::min(iy1, h_);
    for (int iy = iy0; iy < iy1; ++iy)
        for (int ix = ix0; ix < ix1; ++ix)
            cells_[static_cast<std::size_t>(iy) * w_ + ix] = occ ? 1 : 0;
}

bool OccupancyGrid::occupied_at(Vec2 p) const {
    auto [ix, iy] = cell_of(p);
    return occupied(ix, iy);
}

std::size_t OccupancyGrid::count_occupied() const {
    std::size_t n = 0;
    for (uint8_t c : cells_) n += c;
    return n;
}

std::string OccupancyGrid::serialize() const {
    std::string out;
    out.reserve(static_cast<std::size_t>(h_) * (w_ + 1) + 32);
    char header[64];
    std::snprintf(header, sizeof(header), "%d %d %g\n", w_, h_, res_);
    out += header;
    for (int row = 0; row < h_; ++row) {
        int iy = h_ - 1 - row;  // top row first
        for (int ix = 0; ix < w_; ++ix)
            out += cells_[static_cast<std::size_t>(iy) * w_ + ix] ? '#' : '.';
        out += '\n';
    }
    return out;
}

void OccupancyGrid::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f << serialize();
    if (!f) throw Error("write failed: " + path);
}

OccupancyGrid OccupancyGrid::parse(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("grid: empty input");
    int w = 0, h = 0;
    double res = 0.0;
    {
        std::istringstream hs(header);
        if (!(hs >> w >> h >> res))
            throw ParseError("grid: bad header '" + header + "'");
        std::string extra;
        if (hs >> extra) throw ParseError("grid: trailing tokens in header");
    }
    if (w <= 0 || h <= 0 || !(res > 0.0))
        throw ParseError("grid: non-positive dimensions or resolution");
    OccupancyGrid g(w, h, res);
    for (int row = 0; row < h; ++row) {
        std::string line;
        if (!std::getline(in, line))
            throw ParseError("grid: truncated, expected " + std::to_string(h) + " rows");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (static_cast<int>(line.size()) != w)
            throw ParseError("grid: row " + std::to_string(row) + " has width " +
                             std::to_string(line.size()) + ", expected " +
                             std::to_string(w));
        int iy = h - 1 - row;
        for (int ix = 0; ix < w; ++ix) {
            char c = line[static_cast<std::size_t>(ix)];
            if (c == '#')
                g.cells_[static_cast<std::size_t>(iy) * w + ix] = 1;
            else if (c == '.')
                g.cells_[static_cast<std::size_t>(iy) * w + ix] = 0;
            else
                throw ParseError(std::string("grid: invalid cell character '") + c + "'");
        }
    }
    return g;
}

OccupancyGrid OccupancyGrid::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open grid file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared distance transform over a sampled function f: lower envelope of
// parabolas rooted at the sites with finite f. Sites with f == inf (no
// obstacle anywhere in that slice so far) simply don't contribute.
void dt1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
          std::vector<double>& z, int n) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        double s = 0.0;
        while (k >= 0) {
            s = ((f[q] + q * static_cast<double>(q)) -
                 (f[v[k]] + v[k] * static_cast<double>(v[k]))) /
                (2.0 * q - 2.0 * v[k]);
            if (s <= z[k])
                --k;
            else
                break;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
        } else {
            ++k;
            v[k] = q;
            z[k] = s;
        }
        z[k + 1] = kInf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) d[q] = kInf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        double dq = q - static_cast<double>(v[j]);
        d[q] = dq * dq + f[v[j]];
    }
}

}  // namespace

DistanceField::DistanceField(const OccupancyGrid& grid)
    : w_(grid.width()), h_(grid.height()), res_(grid.resolution()) {
    std::size_t total = static_cast<std::size_t>(w_) * h_;
    std::vector<double> sq(total);
    for (int iy = 0; iy < h_; ++iy)
        for (int ix = 0; ix < w_; ++ix)
            sq[static_cast<std::size_t>(iy) * w_ + ix] =
                grid.occupied(ix, iy) ? 0.0 : kInf;

    int nmax = std::max(w_, h_);
    std::vector<double> f(nmax), d1(nmax), z(nmax + 1);
    std::vector<int> v(nmax);

    // Columns, then rows: exact 2D squared distances in cell units.
    for (int ix = 0; ix < w_; ++ix) {
        for (int iy = 0; iy < h_; ++iy) f[iy] = sq[static_cast<std::size_t>(iy) * w_ + ix];
        dt1d(f, d1, v, z, h_);
        for (int iy = 0; iy < h_; ++iy) sq[static_cast<std::size_t>(iy) * w_ + ix] = d1[iy];
    }
    for (int iy = 0; iy < h_; ++iy) {
        for (int ix = 0; ix < w_; ++ix) f[ix] = sq[static_cast<std::size_t>(iy) * w_ + ix];
        dt1d(f, d1, v, z, w_);
        for (int ix = 0; ix < w_; ++ix) sq[static_cast<std::size_t>(iy) * w_ + ix] = d1[ix];
    }

    d_.resize(total);
    for (std::size_t i = 0; i < total; ++i)
        d_[i] = sq[i] == kInf ? kInf : std::sqrt(sq[i]) * res_;
}

double DistanceField::sample(Vec2 p) const {
    if (p.x < 0.0 || p.y < 0.0 || p.x >= w_ * res_ || p.y >= h_ * res_) return 0.0;
    // Interpolate between the four surrounding cell centers.
    double gx = p.x / res_ - 0.5;
    double gy = p.y / res_ - 0.5;
    gx = clamp(gx, 0.0, static_cast<double>(w_ - 1));
    gy = clamp(gy, 0.0, static_cast<double>(h_ - 1));
    int ix = std::min(static_cast<int>(gx), w_ - 2 >= 0 ? w_ - 2 : 0);
    int iy = std::min(static_cast<int>(gy), h_ - 2 >= 0 ? h_ - 2 : 0);
    double tx = gx - ix;
    double ty = gy - iy;
    int ix1 = std::min(ix + 1, w_ - 1);
    int iy1 = std::min(iy + 1, h_ - 1);
    double d00 = at_cell(ix, iy), d10 = at_cell(ix1, iy);
    double d01 = at_cell(ix, iy1), d11 = at_cell(ix1, iy1);
    double a = d00 + (d10 - d00) * tx;
    double b = d01 + (d11 - d01) * tx;
    return a + (b - a) * ty;
}

Vec2 DistanceField::gradient(Vec2 p) const {
    double h = res_;
    double dx = (sample({p.x + h, p.y}) - sample({p.x - h, p.y})) / (2.0 * h);
    double dy = (sample({p.x, p.y + h}) - sample({p.x, p.y - h})) / (2.0 * h);
    return {dx, dy};
}

}  // namespace navsim
