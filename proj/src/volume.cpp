#include "lfc/volume.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lfc/errors.hpp"
#include "lfc/png_io.hpp"

namespace lfc {

VolumeGrid VolumeGrid::centered(int nx, int ny, double pitch) {
    VolumeGrid g;
    g.nx = nx;
    g.ny = ny;
    g.pitch = pitch;
    g.origin_x = -double(nx / 2) * pitch;
    g.origin_y = -double(ny / 2) * pitch;
    return g;
}

size_t LightFieldImage::valid_count() const {
    if (mask.empty()) return size_t(ny) * nx;
    size_t n = 0;
    for (uint8_t m : mask)
        if (m) ++n;
    return n;
}

double LightFieldImage::max_value() const {
    double peak = 0.0;
    for (size_t i = 0; i < v.size(); ++i)
        if ((mask.empty() || mask[i]) && v[i] > peak) peak = v[i];
    return peak;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_f32_payload(std::ostream& out, const std::vector<double>& v) {
    std::vector<unsigned char> buf(v.size() * 4);
    for (size_t i = 0; i < v.size(); ++i) {
        float f = static_cast<float>(v[i]);
        uint32_t u;
        std::memcpy(&u, &f, 4);
        buf[4 * i] = u & 0xff;
        buf[4 * i + 1] = (u >> 8) & 0xff;
        buf[4 * i + 2] = (u >> 16) & 0xff;
        buf[4 * i + 3] = (u >> 24) & 0xff;
    }
    out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
}

void read_f32_payload(std::istream& in, std::vector<double>& v, size_t count,
                      const std::string& path) {
    std::vector<unsigned char> buf(count * 4);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (size_t(in.gcount()) != buf.size())
        throw IoError("payload of '" + path + "' is shorter than its header declares");
    v.resize(count);
    for (size_t i = 0; i < count; ++i) {
        uint32_t u = uint32_t(buf[4 * i]) | (uint32_t(buf[4 * i + 1]) << 8) |
                     (uint32_t(buf[4 * i + 2]) << 16) | (uint32_t(buf[4 * i + 3]) << 24);
        float f;
        std::memcpy(&f, &u, 4);
        v[i] = f;
    }
}

std::ifstream open_header(const std::string& path, const char* magic) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw IoError("missing header sidecar '" + path + ".hdr'");
    std::string line;
    if (!std::getline(hdr, line) || line != magic)
        throw IoError("'" + path + ".hdr' is not a " + std::string(magic) + " header");
    return hdr;
}

}  // namespace

void save_volume(const Volume& vol, const std::string& path) {
    if (vol.grid.nx < 1 || vol.grid.ny < 1 || vol.z.empty())
        throw UsageError("volume is empty");
    if (vol.v.size() != size_t(vol.nz()) * vol.grid.ny * vol.grid.nx)
        throw UsageError("volume buffer size does not match its grid");
    std::ofstream hdr(path + ".hdr", std::ios::trunc);
    if (!hdr) throw IoError("cannot write '" + path + ".hdr'");
    hdr << "LFVOL1\n";
    hdr << "nx " << vol.grid.nx << "\n";
    hdr << "ny " << vol.grid.ny << "\n";
    hdr << "nz " << vol.nz() << "\n";
    hdr << "pitch " << fmt_double(vol.grid.pitch) << "\n";
    hdr << "origin_x " << fmt_double(vol.grid.origin_x) << "\n";
    hdr << "origin_y " << fmt_double(vol.grid.origin_y) << "\n";
    for (double z : vol.z) hdr << "z " << fmt_double(z) << "\n";
    hdr.flush();
    if (!hdr) throw IoError("header write to '" + path + ".hdr' failed");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_f32_payload(out, vol.v);
    out.flush();
    if (!out) throw IoError("payload write to '" + path + "' failed");
}

Volume load_volume(const std::string& path) {
    std::ifstream hdr = open_header(path, "LFVOL1");
    Volume vol;
    int nz = 0;
    std::string line;
    while (std::getline(hdr, line)) {
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k == "nx") ls >> vol.grid.nx;
        else if (k == "ny") ls >> vol.grid.ny;
        else if (k == "nz") ls >> nz;
        else if (k == "pitch") ls >> vol.grid.pitch;
        else if (k == "origin_x") ls >> vol.grid.origin_x;
        else if (k == "origin_y") ls >> vol.grid.origin_y;
        else if (k == "z") {
            double z;
            ls >> z;
            vol.z.push_back(z);
        }
    }
    if (vol.grid.nx < 1 || vol.grid.ny < 1 || vol.z.empty() ||
        int(vol.z.size()) != nz || vol.grid.pitch <= 0)
        throw IoError("volume header '" + path + ".hdr' is incomplete");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    read_f32_payload(in, vol.v, size_t(nz) * vol.grid.ny * vol.grid.nx, path);
    return vol;
}

void save_image(const LightFieldImage& img, const std::string& path) {
    if (img.ny < 1 || img.nx < 1) throw UsageError("image is empty");
    if (img.v.size() != size_t(img.ny) * img.nx)
        throw UsageError("image buffer size does not match its dimensions");
    if (!img.mask.empty() && img.mask.size() != img.v.size())
        throw UsageError("image mask size does not match its dimensions");
    std::ofstream hdr(path + ".hdr", std::ios::trunc);
    if (!hdr) throw IoError("cannot write '" + path + ".hdr'");
    hdr << "LFIMG1\n";
    hdr << "nx " << img.nx << "\n";
    hdr << "ny " << img.ny << "\n";
    hdr << "pixel " << fmt_double(img.pixel) << "\n";
    hdr << "mask " << (img.mask.empty() ? 0 : 1) << "\n";
    for (const auto& [k, v] : img.meta) hdr << "meta " << k << " " << v << "\n";
    hdr.flush();
    if (!hdr) throw IoError("header write to '" + path + ".hdr' failed");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_f32_payload(out, img.v);
    if (!img.mask.empty()) {
        std::vector<unsigned char> bits((img.mask.size() + 7) / 8, 0);
        for (size_t i = 0; i < img.mask.size(); ++i)
            if (img.mask[i]) bits[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
        out.write(reinterpret_cast<const char*>(bits.data()), bits.size());
    }
    out.flush();
    if (!out) throw IoError("payload write to '" + path + "' failed");
}

LightFieldImage load_image(const std::string& path) {
    std::ifstream hdr = open_header(path, "LFIMG1");
    LightFieldImage img;
    int has_mask = 0;
    std::string line;
    while (std::getline(hdr, line)) {
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k == "nx") ls >> img.nx;
        else if (k == "ny") ls >> img.ny;
        else if (k == "pixel") ls >> img.pixel;
        else if (k == "mask") ls >> has_mask;
        else if (k == "meta") {
            std::string key;
            ls >> key;
            std::string value;
            std::getline(ls, value);
            if (!value.empty() && value.front() == ' ') value.erase(0, 1);
            img.meta[key] = value;
        }
    }
    if (img.nx < 1 || img.ny < 1)
        throw IoError("image header '" + path + ".hdr' is incomplete");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    size_t count = size_t(img.ny) * img.nx;
    read_f32_payload(in, img.v, count, path);
    if (has_mask) {
        std::vector<unsigned char> bits((count + 7) / 8);
        in.read(reinterpret_cast<char*>(bits.data()), bits.size());
        if (size_t(in.gcount()) != bits.size())
            throw IoError("validity bitmap of '" + path + "' is truncated");
        img.mask.resize(count);
        for (size_t i = 0; i < count; ++i)
            img.mask[i] = (bits[i / 8] >> (i % 8)) & 1u;
    }
    return img;
}

void image_to_png(const LightFieldImage& img, const std::string& path) {
    double peak = img.max_value();
    double scale = peak > 0 ? 65535.0 / peak : 0.0;
    std::vector<uint16_t> px(size_t(img.ny) * img.nx, 0);
    for (int y = 0; y < img.ny; ++y) {
        for (int x = 0; x < img.nx; ++x) {
            if (!img.valid(y, x)) continue;
            double q = std::floor(img.at(y, x) * scale + 0.5);
            px[size_t(y) * img.nx + x] =
                static_cast<uint16_t>(std::min(65535.0, std::max(0.0, q)));
        }
    }
    std::map<std::string, std::string> text;
    text["peak"] = fmt_double(peak);
    text["pixel"] = fmt_double(img.pixel);
    write_gray_png(path, img.nx, img.ny, 16, px, text);
}

Volume volume_from_pngs(const std::vector<std::string>& paths, const VolumeGrid& grid,
                        const std::vector<double>& z) {
    if (paths.size() != z.size())
        throw UsageError("need exactly one image per depth plane");
    if (paths.empty()) throw UsageError("no plane images given");
    Volume vol;
    vol.grid = grid;
    vol.z = z;
    vol.v.resize(paths.size() * size_t(grid.ny) * grid.nx);
    for (size_t p = 0; p < paths.size(); ++p) {
        GrayPng png = read_gray_png(paths[p]);
        if (png.width != grid.nx || png.height != grid.ny) {
            std::ostringstream os;
            os << "'" << paths[p] << "' is " << png.width << "x" << png.height
               << " but the grid is " << grid.nx << "x" << grid.ny;
            throw UsageError(os.str());
        }
        double inv = 1.0 / double((1u << png.bit_depth) - 1);
        double* plane = vol.plane(int(p));
        for (size_t i = 0; i < png.pixels.size(); ++i) plane[i] = png.pixels[i] * inv;
    }
    return vol;
}

}  // namespace lfc
