#include "lfc/digitize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lfc/checksum.hpp"
#include "lfc/errors.hpp"
#include "lfc/png_io.hpp"

namespace lfc {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<uint8_t> pack_bits(const std::vector<uint8_t>& plane) {
    std::vector<uint8_t> out((plane.size() + 7) / 8, 0);
    for (size_t i = 0; i < plane.size(); ++i)
        if (plane[i]) out[i / 8] |= uint8_t(1u << (i % 8));
    return out;
}

}  // namespace

BinaryPlaneSet digitize(const LightFieldImage& img, int bits) {
    if (bits < 1 || bits > 16) throw UsageError("bit depth must lie in [1, 16]");
    if (img.ny < 1 || img.nx < 1 || img.v.size() != size_t(img.ny) * img.nx)
        throw UsageError("image is empty or inconsistent");
    double peak = 0.0;
    for (double v : img.v) {
        if (!std::isfinite(v)) throw NumericalError("image has non-finite pixel values");
        if (v < 0.0) throw UsageError("image has negative pixel values");
        peak = std::max(peak, v);
    }

    BinaryPlaneSet set;
    set.ny = img.ny;
    set.nx = img.nx;
    set.bits = bits;
    set.peak = peak;
    set.pixel = img.pixel;
    set.meta = img.meta;
    size_t n = img.v.size();
    set.planes.assign(bits, std::vector<uint8_t>(n, 0));

    uint32_t levels = (1u << bits) - 1;
    double scale = peak > 0 ? double(levels) / peak : 0.0;
    for (size_t i = 0; i < n; ++i) {
        uint32_t level = uint32_t(std::floor(img.v[i] * scale + 0.5));
        if (level > levels) level = levels;
        for (int b = 0; b < bits; ++b) set.planes[b][i] = uint8_t((level >> b) & 1u);
    }
    return set;
}

LightFieldImage reassemble(const BinaryPlaneSet& set) {
    if (set.bits < 1 || set.planes.size() != size_t(set.bits))
        throw UsageError("plane set is empty or inconsistent");
    size_t n = size_t(set.ny) * set.nx;
    for (const auto& p : set.planes)
        if (p.size() != n) throw UsageError("plane size mismatch");

    LightFieldImage img;
    img.ny = set.ny;
    img.nx = set.nx;
    img.pixel = set.pixel;
    img.meta = set.meta;
    img.v.assign(n, 0.0);
    uint32_t levels = (1u << set.bits) - 1;
    double unit = set.peak > 0 ? set.peak / double(levels) : 0.0;
    for (size_t i = 0; i < n; ++i) {
        uint32_t level = 0;
        for (int b = 0; b < set.bits; ++b)
            if (set.planes[b][i]) level |= 1u << b;
        img.v[i] = double(level) * unit;
    }
    return img;
}

void save_planes(const BinaryPlaneSet& set, const std::string& path) {
    if (set.bits < 1 || set.planes.size() != size_t(set.bits))
        throw UsageError("plane set is empty or inconsistent");
    std::vector<std::vector<uint8_t>> packed;
    packed.reserve(set.planes.size());
    Fnv1a fnv;
    for (const auto& p : set.planes) {
        packed.push_back(pack_bits(p));
        fnv.update(packed.back().data(), packed.back().size());
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "LFBP1\n";
    out << "nx " << set.nx << "\n";
    out << "ny " << set.ny << "\n";
    out << "bits " << set.bits << "\n";
    out << "peak " << fmt_double(set.peak) << "\n";
    out << "pixel " << fmt_double(set.pixel) << "\n";
    for (const auto& [k, v] : set.meta) out << "meta " << k << " " << v << "\n";
    char cs[32];
    std::snprintf(cs, sizeof cs, "%016llx", static_cast<unsigned long long>(fnv.value()));
    out << "checksum " << cs << "\n";
    out << "data\n";
    for (const auto& p : packed)
        out.write(reinterpret_cast<const char*>(p.data()), p.size());
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

BinaryPlaneSet load_planes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "LFBP1")
        throw IoError("'" + path + "' is not a bit-plane container");

    BinaryPlaneSet set;
    uint64_t declared = 0;
    bool have_data = false;
    while (std::getline(in, line)) {
        if (line == "data") {
            have_data = true;
            break;
        }
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k == "nx") ls >> set.nx;
        else if (k == "ny") ls >> set.ny;
        else if (k == "bits") ls >> set.bits;
        else if (k == "peak") { std::string r; ls >> r; set.peak = std::stod(r); }
        else if (k == "pixel") { std::string r; ls >> r; set.pixel = std::stod(r); }
        else if (k == "checksum") { std::string r; ls >> r; declared = std::stoull(r, nullptr, 16); }
        else if (k == "meta") {
            std::string key, value;
            ls >> key;
            std::getline(ls, value);
            if (!value.empty() && value.front() == ' ') value.erase(0, 1);
            set.meta[key] = value;
        }
    }
    if (!have_data || set.nx < 1 || set.ny < 1 || set.bits < 1 || set.bits > 16)
        throw IoError("bit-plane header of '" + path + "' is incomplete");

    size_t n = size_t(set.ny) * set.nx;
    size_t packed_size = (n + 7) / 8;
    Fnv1a fnv;
    set.planes.assign(set.bits, std::vector<uint8_t>(n, 0));
    std::vector<uint8_t> buf(packed_size);
    for (int b = 0; b < set.bits; ++b) {
        in.read(reinterpret_cast<char*>(buf.data()), buf.size());
        if (size_t(in.gcount()) != buf.size())
            throw IoError("bit-plane payload of '" + path + "' is truncated");
        fnv.update(buf.data(), buf.size());
        for (size_t i = 0; i < n; ++i) set.planes[b][i] = (buf[i / 8] >> (i % 8)) & 1u;
    }
    if (fnv.value() != declared)
        throw IoError("bit-plane checksum mismatch (file corrupt or edited)");
    return set;
}

void plane_to_png(const BinaryPlaneSet& set, int index, const std::string& path) {
    if (index < 0 || index >= int(set.planes.size()))
        throw UsageError("plane index out of range");
    const auto& p = set.planes[index];
    std::vector<uint16_t> px(p.size());
    for (size_t i = 0; i < p.size(); ++i) px[i] = p[i] ? 255 : 0;
    std::map<std::string, std::string> text;
    text["bit"] = std::to_string(index);
    text["bits"] = std::to_string(set.bits);
    text["peak"] = fmt_double(set.peak);
    write_gray_png(path, set.nx, set.ny, 8, px, text);
}

std::vector<uint8_t> plane_from_png(const std::string& path, int& ny, int& nx) {
    GrayPng png = read_gray_png(path);
    ny = png.height;
    nx = png.width;
    uint16_t mid = png.bit_depth == 16 ? 32768 : 128;
    std::vector<uint8_t> out(png.pixels.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = png.pixels[i] >= mid ? 1 : 0;
    return out;
}

}  // namespace lfc
