#include "lfc/scenes.hpp"

#include <algorithm>
#include <cmath>

#include "lfc/errors.hpp"

namespace lfc {

namespace {

using Glyph = std::vector<std::string>;

const Glyph kLetterS = {
    ".########.",
    "##########",
    "##......##",
    "##........",
    "#########.",
    ".#########",
    "........##",
    "##......##",
    "##########",
    ".########.",
};

const Glyph kLetterB = {
    "#########.",
    "##########",
    "##......##",
    "##......##",
    "#########.",
    "#########.",
    "##......##",
    "##......##",
    "##########",
    "#########.",
};

const Glyph kLetterU = {
    "##......##",
    "##......##",
    "##......##",
    "##......##",
    "##......##",
    "##......##",
    "##......##",
    "##......##",
    "##########",
    ".########.",
};

const Glyph kDeer = {
    "#..#....#..#",
    "#.#......#.#",
    ".##########.",
    "...#....#...",
    "...######...",
    "..########..",
    "..########..",
    "..########..",
    "..#......#..",
    "..#......#..",
    "..#......#..",
};

const Glyph kDog = {
    "##.........#",
    "###.......##",
    ".##########.",
    ".##########.",
    ".##########.",
    ".##########.",
    ".##......##.",
    ".##......##.",
    ".##......##.",
};

const Glyph kBird = {
    ".##......##.",
    "#..#....#..#",
    "....#..#....",
    "....####....",
    "...######...",
    "..########..",
    "...######...",
    "....####....",
    ".....##.....",
};

// nearest-neighbour stamp of a glyph into one plane, centred at fractional
// grid position (cy, cx), box height = frac * ny, width follows the aspect
void stamp(Volume& vol, int zi, const Glyph& g, double cy, double cx, double frac,
           double amp) {
    int rows = int(g.size());
    int cols = int(g[0].size());
    int ny = vol.grid.ny, nx = vol.grid.nx;
    int box_h = std::max(rows, int(std::lround(frac * ny)));
    int box_w = std::max(cols, int(std::lround(double(box_h) * cols / rows)));
    box_h = std::min(box_h, ny);
    box_w = std::min(box_w, nx);
    int top = int(std::lround(cy * ny - box_h / 2.0));
    int left = int(std::lround(cx * nx - box_w / 2.0));
    top = std::max(0, std::min(top, ny - box_h));
    left = std::max(0, std::min(left, nx - box_w));
    for (int y = 0; y < box_h; ++y) {
        int r = std::min(rows - 1, y * rows / box_h);
        for (int x = 0; x < box_w; ++x) {
            int c = std::min(cols - 1, x * cols / box_w);
            if (g[r][c] == '#') {
                double& v = vol.at(zi, top + y, left + x);
                v = std::max(v, amp);
            }
        }
    }
}

int nearest_plane(const std::vector<double>& z, double target) {
    int best = 0;
    for (int i = 1; i < int(z.size()); ++i)
        if (std::fabs(z[i] - target) < std::fabs(z[best] - target)) best = i;
    return best;
}

// smooth ellipsoid, half axes (ax, ay, az) meters, value amp * (1 - r^2)
void stamp_blob(Volume& vol, double cy, double cx, double zc, double ax, double ay,
                double az, double amp) {
    int ny = vol.grid.ny, nx = vol.grid.nx;
    double center_x = vol.grid.origin_x + cx * (nx - 1) * vol.grid.pitch;
    double center_y = vol.grid.origin_y + cy * (ny - 1) * vol.grid.pitch;
    for (int zi = 0; zi < vol.nz(); ++zi) {
        double dz = (vol.z[zi] - zc) / az;
        if (dz * dz >= 1.0) continue;
        for (int y = 0; y < ny; ++y) {
            double py = vol.grid.origin_y + y * vol.grid.pitch;
            double dy = (py - center_y) / ay;
            for (int x = 0; x < nx; ++x) {
                double px = vol.grid.origin_x + x * vol.grid.pitch;
                double dx = (px - center_x) / ax;
                double r2 = dx * dx + dy * dy + dz * dz;
                if (r2 >= 1.0) continue;
                double& v = vol.at(zi, y, x);
                v = std::max(v, amp * (1.0 - r2));
            }
        }
    }
}

const double kDepthTargets[3] = {-60e-6, -34e-6, -10e-6};

}  // namespace

std::vector<std::string> demo_scene_names() {
    return {"sbu", "grayscale3", "grayscale4", "multiplex"};
}

Volume demo_scene(const std::string& name, const VolumeGrid& grid,
                  const std::vector<double>& z_planes) {
    if (grid.nx < 8 || grid.ny < 8) throw UsageError("scene grid must be at least 8x8");
    if (grid.pitch <= 0) throw UsageError("scene grid pitch must be positive");
    if (z_planes.empty()) throw UsageError("scene needs at least one depth plane");

    Volume vol;
    vol.grid = grid;
    vol.z = z_planes;
    vol.v.assign(size_t(z_planes.size()) * grid.ny * grid.nx, 0.0);

    int zi[3];
    for (int i = 0; i < 3; ++i) zi[i] = nearest_plane(z_planes, kDepthTargets[i]);

    const double pos[3][2] = {{0.27, 0.27}, {0.5, 0.5}, {0.73, 0.73}};
    const double box = 0.44;

    if (name == "sbu" || name == "grayscale3" || name == "grayscale4") {
        double amp[3] = {1.0, 1.0, 1.0};
        if (name == "grayscale3") {
            amp[0] = 128.0 / 255.0;
            amp[1] = 1.0;
            amp[2] = 128.0 / 255.0;
        } else if (name == "grayscale4") {
            amp[0] = 85.0 / 255.0;
            amp[1] = 170.0 / 255.0;
            amp[2] = 1.0;
        }
        const Glyph* letters[3] = {&kLetterS, &kLetterB, &kLetterU};
        for (int i = 0; i < 3; ++i)
            stamp(vol, zi[i], *letters[i], pos[i][0], pos[i][1], box, amp[i]);
        return vol;
    }
    if (name == "multiplex") {
        const Glyph* animals[3] = {&kDeer, &kDog, &kBird};
        const double apos[3][2] = {{0.25, 0.25}, {0.5, 0.5}, {0.75, 0.25}};
        for (int i = 0; i < 3; ++i)
            stamp(vol, zi[i], *animals[i], apos[i][0], apos[i][1], box, 1.0);
        auto [zmin, zmax] = std::minmax_element(z_planes.begin(), z_planes.end());
        stamp_blob(vol, 0.75, 0.75, 0.5 * (*zmin + *zmax), 15e-6, 15e-6, 25e-6, 1.0);
        return vol;
    }
    std::string known;
    for (const auto& n : demo_scene_names()) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown scene '" + name + "' (known: " + known + ")");
}

}  // namespace lfc
