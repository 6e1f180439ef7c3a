#include "lfc/psf.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lfc/checksum.hpp"
#include "lfc/debye.hpp"
#include "lfc/errors.hpp"
#include "lfc/parallel.hpp"
#include "lfc/propagate.hpp"
#include "lfc/rng.hpp"

namespace lfc {

double SparsePsf::sum() const {
    long double s = 0.0L;
    for (double v : a) s += v;
    return static_cast<double>(s);
}

size_t SparsePsf::nnz() const {
    size_t n = 0;
    for (double v : a)
        if (v != 0.0) ++n;
    return n;
}

int offsets_per_period(const OpticalConfig& cfg, double voxel_pitch) {
    if (voxel_pitch <= 0) throw ConfigError("voxel pitch must be positive");
    double r = cfg.lenslet_pitch / (cfg.magnification * voxel_pitch);
    long k = std::lround(r);
    if (k < 1 || std::fabs(r - double(k)) > 1e-6 * r) {
        std::ostringstream os;
        os << "lenslet period (" << cfg.lenslet_pitch / cfg.magnification
           << " m in object space) is not an integer multiple of the voxel pitch "
           << voxel_pitch << " m";
        throw ConfigError(os.str());
    }
    return static_cast<int>(k);
}

namespace {

inline int mod_floor(int a, int m) { return ((a % m) + m) % m; }

// Per-plane state shared by all offsets: combined lenslet-phase x mask tile
// and the sensor amplitude mask.
struct PsfContext {
    OpticalConfig cfg;
    std::vector<cplx> tile;  // grid_per_lenslet^2, lens phase times mask
    std::vector<double> ram2;
    int n_out = 0;
    int bin = 0;
};

PsfContext make_context(const OpticalConfig& cfg, const MaskSpec& mask) {
    cfg.validate();
    PsfContext ctx;
    ctx.cfg = cfg;
    ctx.bin = cfg.grid_per_sensor();
    ctx.n_out = cfg.psf_samples / ctx.bin;
    // lens phase and mask values share the cell-local lattice, so build one tile
    int r = cfg.grid_per_lenslet();
    ctx.tile.assign(size_t(r) * r, cplx(1.0, 0.0));
    {
        int h = r / 2;
        double coef = -M_PI / (cfg.wavelength * cfg.lenslet_focal);
        for (int ly = 0; ly < r; ++ly) {
            double yl = (ly - h) * cfg.mask_pixel;
            for (int lx = 0; lx < r; ++lx) {
                double xl = (lx - h) * cfg.mask_pixel;
                ctx.tile[size_t(ly) * r + lx] = std::polar(1.0, coef * (xl * xl + yl * yl));
            }
        }
        if (mask.kind != MaskKind::none) {
            for (int ly = 0; ly < r; ++ly) {
                for (int lx = 0; lx < r; ++lx) {
                    double u = uniform01(mask.seed, rng_role::lenslet_mask, ly, lx);
                    cplx m;
                    if (mask.kind == MaskKind::phase) {
                        m = std::polar(1.0, -M_PI * (u - 0.5));
                    } else {
                        m = cplx(mask.law == AmplitudeLaw::binary ? (u < 0.5 ? 0.0 : 1.0) : u,
                                 0.0);
                    }
                    ctx.tile[size_t(ly) * r + lx] *= m;
                }
            }
        }
    }
    ctx.ram2 = sensor_amplitude_mask(cfg, mask, ctx.n_out);
    return ctx;
}

SparsePsf finalize_psf(std::vector<double>& intensity, int n_out, double threshold) {
    double peak = 0.0;
    for (double v : intensity) peak = std::max(peak, v);
    if (!(peak > 0.0)) throw NumericalError("point-spread function carries no energy");
    double cut = threshold * peak;
    long double sum = 0.0L;
    for (double& v : intensity) {
        if (v < cut) v = 0.0;
        sum += v;
    }
    double inv = 1.0 / static_cast<double>(sum);
    int rmin = n_out, rmax = -1, cmin = n_out, cmax = -1;
    for (int r = 0; r < n_out; ++r) {
        for (int c = 0; c < n_out; ++c) {
            double& v = intensity[size_t(r) * n_out + c];
            if (v == 0.0) continue;
            v *= inv;
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
            cmin = std::min(cmin, c);
            cmax = std::max(cmax, c);
        }
    }
    SparsePsf p;
    p.window = n_out;
    p.r0 = rmin;
    p.c0 = cmin;
    p.h = rmax - rmin + 1;
    p.w = cmax - cmin + 1;
    p.a.resize(size_t(p.h) * p.w);
    for (int r = 0; r < p.h; ++r)
        for (int c = 0; c < p.w; ++c)
            p.a[size_t(r) * p.w + c] = intensity[size_t(r + rmin) * n_out + (c + cmin)];
    return p;
}

SparsePsf point_psf_in(const PsfContext& ctx, const DebyeProfile& profile, double px,
                       double py) {
    const OpticalConfig& cfg = ctx.cfg;
    ComplexField f = debye_field(cfg, profile, px, py);

    int r = cfg.grid_per_lenslet();
    int h = r / 2;
    int c = f.center();
    for (int row = 0; row < f.n; ++row) {
        int ly = mod_floor(row - c + h, r);
        const cplx* trow = &ctx.tile[size_t(ly) * r];
        cplx* frow = &f.v[size_t(row) * f.n];
        for (int col = 0; col < f.n; ++col) frow[col] *= trow[mod_floor(col - c + h, r)];
    }

    f = propagate(f, cfg.lenslet_focal, cfg.wavelength);

    int b = ctx.bin;
    int n_out = ctx.n_out;
    std::vector<double> intensity(size_t(n_out) * n_out, 0.0);
    if (b == 1) {
        for (size_t i = 0; i < f.v.size(); ++i) intensity[i] = std::norm(f.v[i]);
    } else {
        for (int R = 0; R < n_out; ++R)
            for (int dr = 0; dr < b; ++dr) {
                const cplx* frow = &f.v[size_t(R * b + dr) * f.n];
                double* orow = &intensity[size_t(R) * n_out];
                for (int C = 0; C < n_out; ++C)
                    for (int dc = 0; dc < b; ++dc) orow[C] += std::norm(frow[C * b + dc]);
            }
    }
    for (size_t i = 0; i < intensity.size(); ++i)
        intensity[i] *= ctx.ram2[i] * ctx.ram2[i];

    return finalize_psf(intensity, n_out, cfg.crop_threshold);
}

double profile_reach(const OpticalConfig& cfg, double max_offset) {
    double half = double((cfg.psf_samples - 1) / 2) * cfg.mask_pixel / cfg.magnification;
    double a = half + std::fabs(max_offset);
    return std::sqrt(2.0) * a + cfg.mask_pixel / cfg.magnification;
}

}  // namespace

SparsePsf compute_point_psf(const OpticalConfig& cfg, const MaskSpec& mask, double px,
                            double py, double pz) {
    PsfContext ctx = make_context(cfg, mask);
    DebyeProfile profile(cfg, pz, profile_reach(cfg, std::max(std::fabs(px), std::fabs(py))));
    return point_psf_in(ctx, profile, px, py);
}

std::vector<SparsePsf> build_psf_plane(const OpticalConfig& cfg, const MaskSpec& mask,
                                       double z, double voxel_pitch) {
    int P = offsets_per_period(cfg, voxel_pitch);
    PsfContext ctx = make_context(cfg, mask);
    DebyeProfile profile(cfg, z, profile_reach(cfg, double(P - 1) * voxel_pitch));
    std::vector<SparsePsf> out(size_t(P) * P);
    parallel_for(out.size(), [&](size_t q) {
        int qy = static_cast<int>(q) / P;
        int qx = static_cast<int>(q) % P;
        out[q] = point_psf_in(ctx, profile, qx * voxel_pitch, qy * voxel_pitch);
    });
    return out;
}

PsfKey build_psf_key(const OpticalConfig& cfg, const MaskSpec& mask,
                     const std::vector<double>& z_planes, double voxel_pitch) {
    if (z_planes.empty()) throw ConfigError("key needs at least one depth plane");
    PsfKey key;
    key.config = cfg;
    key.mask = mask;
    key.z_planes = z_planes;
    key.offset_pitch = voxel_pitch;
    key.offsets = offsets_per_period(cfg, voxel_pitch);
    key.window = cfg.psf_samples / cfg.grid_per_sensor();
    key.psfs.reserve(size_t(z_planes.size()) * key.offsets * key.offsets);
    for (double z : z_planes) {
        auto plane = build_psf_plane(cfg, mask, z, voxel_pitch);
        for (auto& p : plane) key.psfs.push_back(std::move(p));
    }
    key.checksum = psf_key_checksum(key);
    return key;
}

// ---------------------------------------------------------------------------
// container I/O

namespace {

void append_u32(std::vector<unsigned char>& b, uint32_t v) {
    b.push_back(v & 0xff);
    b.push_back((v >> 8) & 0xff);
    b.push_back((v >> 16) & 0xff);
    b.push_back((v >> 24) & 0xff);
}

void append_f64(std::vector<unsigned char>& b, double d) {
    uint64_t u;
    std::memcpy(&u, &d, 8);
    for (int i = 0; i < 8; ++i) b.push_back((u >> (8 * i)) & 0xff);
}

// one PSF as its little-endian sparse block: count then (offset, value)
// pairs in window row-major order, zeros skipped
std::vector<unsigned char> serialize_psf(const SparsePsf& p) {
    std::vector<unsigned char> b;
    uint32_t nnz = static_cast<uint32_t>(p.nnz());
    b.reserve(4 + size_t(nnz) * 12);
    append_u32(b, nnz);
    for (int r = 0; r < p.h; ++r) {
        for (int c = 0; c < p.w; ++c) {
            double v = p.a[size_t(r) * p.w + c];
            if (v == 0.0) continue;
            append_u32(b, uint32_t(r + p.r0) * uint32_t(p.window) + uint32_t(c + p.c0));
            append_f64(b, v);
        }
    }
    return b;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* kind_name(MaskKind k) {
    switch (k) {
        case MaskKind::none: return "none";
        case MaskKind::phase: return "phase";
        case MaskKind::amplitude: return "amplitude";
    }
    return "none";
}

MaskKind kind_from(const std::string& s) {
    if (s == "none") return MaskKind::none;
    if (s == "phase") return MaskKind::phase;
    if (s == "amplitude") return MaskKind::amplitude;
    throw IoError("unknown mask kind '" + s + "'");
}

std::string header_text(const OpticalConfig& cfg, const MaskSpec& mask,
                        const std::vector<double>& z_planes, double offset_pitch,
                        int offsets, int window, size_t psf_count, uint64_t checksum) {
    std::ostringstream os;
    os << "LFPK1\n";
    os << "format_version 1\n";
    os << "na " << fmt_double(cfg.na) << "\n";
    os << "magnification " << fmt_double(cfg.magnification) << "\n";
    os << "refractive_index " << fmt_double(cfg.refractive_index) << "\n";
    os << "wavelength " << fmt_double(cfg.wavelength) << "\n";
    os << "lenslet_pitch " << fmt_double(cfg.lenslet_pitch) << "\n";
    os << "lenslet_focal " << fmt_double(cfg.lenslet_focal) << "\n";
    os << "mask_pixel " << fmt_double(cfg.mask_pixel) << "\n";
    os << "sensor_pixel " << fmt_double(cfg.sensor_pixel) << "\n";
    os << "psf_samples " << cfg.psf_samples << "\n";
    os << "theta_steps " << cfg.theta_steps << "\n";
    os << "crop_threshold " << fmt_double(cfg.crop_threshold) << "\n";
    os << "mask_kind " << kind_name(mask.kind) << "\n";
    os << "mask_seed " << mask.seed << "\n";
    os << "amplitude_law " << (mask.law == AmplitudeLaw::binary ? "binary" : "uniform")
       << "\n";
    os << "sensor_mask " << (mask.sensor_mask ? 1 : 0) << "\n";
    os << "sensor_seed " << mask.sensor_seed << "\n";
    os << "offset_pitch " << fmt_double(offset_pitch) << "\n";
    os << "offsets " << offsets << "\n";
    os << "window " << window << "\n";
    os << "z_count " << z_planes.size() << "\n";
    for (double z : z_planes) os << "z " << fmt_double(z) << "\n";
    os << "psf_count " << psf_count << "\n";
    char cs[32];
    std::snprintf(cs, sizeof cs, "%016llx", static_cast<unsigned long long>(checksum));
    os << "checksum " << cs << "\n";
    os << "data\n";
    return os.str();
}

}  // namespace

uint64_t psf_key_checksum(const PsfKey& key) {
    Fnv1a fnv;
    for (const auto& p : key.psfs) {
        auto block = serialize_psf(p);
        fnv.update(block.data(), block.size());
    }
    return fnv.value();
}

struct PsfKeyWriter::Impl {
    std::ofstream out;
    Fnv1a fnv;
    std::streampos checksum_pos = -1;
    size_t expected = 0;
    size_t written = 0;
    bool finished = false;
};

PsfKeyWriter::PsfKeyWriter(const std::string& path, const OpticalConfig& cfg,
                           const MaskSpec& mask, const std::vector<double>& z_planes,
                           double offset_pitch)
    : impl_(new Impl) {
    int offsets = offsets_per_period(cfg, offset_pitch);
    int window = cfg.psf_samples / cfg.grid_per_sensor();
    impl_->expected = z_planes.size() * size_t(offsets) * offsets;
    impl_->out.open(path, std::ios::binary | std::ios::trunc);
    if (!impl_->out) throw IoError("cannot open '" + path + "' for writing");
    std::string header =
        header_text(cfg, mask, z_planes, offset_pitch, offsets, window, impl_->expected, 0);
    size_t cs = header.rfind("checksum ");
    impl_->out.write(header.data(), header.size());
    impl_->checksum_pos = std::streampos(cs + 9);
}

PsfKeyWriter::~PsfKeyWriter() = default;

void PsfKeyWriter::write_psf(const SparsePsf& psf) {
    if (impl_->finished) throw UsageError("writer already finished");
    if (impl_->written >= impl_->expected) throw UsageError("more blocks than declared");
    auto block = serialize_psf(psf);
    impl_->fnv.update(block.data(), block.size());
    impl_->out.write(reinterpret_cast<const char*>(block.data()), block.size());
    ++impl_->written;
}

uint64_t PsfKeyWriter::finish() {
    if (impl_->finished) throw UsageError("writer already finished");
    if (impl_->written != impl_->expected)
        throw UsageError("block count does not match the declared psf_count");
    uint64_t cs = impl_->fnv.value();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(cs));
    impl_->out.seekp(impl_->checksum_pos);
    impl_->out.write(buf, 16);
    impl_->out.flush();
    if (!impl_->out) throw IoError("key write failed");
    impl_->out.close();
    impl_->finished = true;
    return cs;
}

void save_psf_key(const PsfKey& key, const std::string& path) {
    PsfKeyWriter w(path, key.config, key.mask, key.z_planes, key.offset_pitch);
    for (const auto& p : key.psfs) w.write_psf(p);
    w.finish();
}

namespace {

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) |
           (uint32_t(b[3]) << 24);
}

double read_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= uint64_t(b[i]) << (8 * i);
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}

struct KeyHeader {
    OpticalConfig config;
    MaskSpec mask;
    std::vector<double> z_planes;
    double offset_pitch = 0.0;
    int offsets = 0;
    int window = 0;
    size_t psf_count = 0;
    uint64_t checksum = 0;
};

KeyHeader parse_key_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line != "LFPK1")
        throw IoError("'" + path + "' is not a key container (bad magic)");
    KeyHeader h;
    size_t z_count = 0;
    bool have_data = false;
    while (std::getline(in, line)) {
        if (line == "data") {
            have_data = true;
            break;
        }
        std::istringstream ls(line);
        std::string k, rest;
        ls >> k >> rest;
        if (k == "format_version") {
            if (rest != "1") throw IoError("unsupported key format version " + rest);
        } else if (k == "na") h.config.na = std::stod(rest);
        else if (k == "magnification") h.config.magnification = std::stod(rest);
        else if (k == "refractive_index") h.config.refractive_index = std::stod(rest);
        else if (k == "wavelength") h.config.wavelength = std::stod(rest);
        else if (k == "lenslet_pitch") h.config.lenslet_pitch = std::stod(rest);
        else if (k == "lenslet_focal") h.config.lenslet_focal = std::stod(rest);
        else if (k == "mask_pixel") h.config.mask_pixel = std::stod(rest);
        else if (k == "sensor_pixel") h.config.sensor_pixel = std::stod(rest);
        else if (k == "psf_samples") h.config.psf_samples = std::stoi(rest);
        else if (k == "theta_steps") h.config.theta_steps = std::stoi(rest);
        else if (k == "crop_threshold") h.config.crop_threshold = std::stod(rest);
        else if (k == "mask_kind") h.mask.kind = kind_from(rest);
        else if (k == "mask_seed") h.mask.seed = std::stoull(rest);
        else if (k == "amplitude_law")
            h.mask.law = (rest == "uniform") ? AmplitudeLaw::uniform : AmplitudeLaw::binary;
        else if (k == "sensor_mask") h.mask.sensor_mask = (rest == "1");
        else if (k == "sensor_seed") h.mask.sensor_seed = std::stoull(rest);
        else if (k == "offset_pitch") h.offset_pitch = std::stod(rest);
        else if (k == "offsets") h.offsets = std::stoi(rest);
        else if (k == "window") h.window = std::stoi(rest);
        else if (k == "z_count") z_count = std::stoul(rest);
        else if (k == "z") h.z_planes.push_back(std::stod(rest));
        else if (k == "psf_count") h.psf_count = std::stoul(rest);
        else if (k == "checksum") h.checksum = std::stoull(rest, nullptr, 16);
        // unknown keys are ignored for forward compatibility
    }
    if (!have_data) throw IoError("key container '" + path + "' has no data section");
    if (h.z_planes.size() != z_count)
        throw IoError("key container z plane count mismatch");
    if (h.offsets < 1 || h.window < 1)
        throw IoError("key container offsets/window invalid");
    if (h.psf_count != h.z_planes.size() * size_t(h.offsets) * h.offsets)
        throw IoError("key container psf_count inconsistent with z_count and offsets");
    h.config.validate();
    return h;
}

SparsePsf read_psf_block(std::istream& in, int window, Fnv1a& fnv,
                         const std::string& path, Fnv1a* fnv2 = nullptr) {
    uint32_t wsq = uint32_t(window) * uint32_t(window);
    uint32_t nnz = read_u32(in);
    if (!in || nnz > wsq) throw IoError("corrupt PSF block in '" + path + "'");
    std::vector<uint32_t> offs(nnz);
    std::vector<double> vals(nnz);
    int rmin = window, rmax = -1, cmin = window, cmax = -1;
    for (uint32_t e = 0; e < nnz; ++e) {
        offs[e] = read_u32(in);
        vals[e] = read_f64(in);
        if (!in) throw IoError("truncated PSF block in '" + path + "'");
        if (offs[e] >= wsq) throw IoError("PSF entry offset out of range");
        if (!(vals[e] >= 0.0) || !std::isfinite(vals[e]))
            throw IoError("PSF entry value invalid");
        int r = int(offs[e] / uint32_t(window));
        int c = int(offs[e] % uint32_t(window));
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    SparsePsf p;
    p.window = window;
    if (rmax >= 0) {
        p.r0 = rmin;
        p.c0 = cmin;
        p.h = rmax - rmin + 1;
        p.w = cmax - cmin + 1;
        p.a.assign(size_t(p.h) * p.w, 0.0);
        for (uint32_t e = 0; e < nnz; ++e) {
            int r = int(offs[e] / uint32_t(window)) - p.r0;
            int c = int(offs[e] % uint32_t(window)) - p.c0;
            p.a[size_t(r) * p.w + c] = vals[e];
        }
    }
    auto block = serialize_psf(p);
    fnv.update(block.data(), block.size());
    if (fnv2) fnv2->update(block.data(), block.size());
    return p;
}

}  // namespace

PsfKey load_psf_key(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open key file '" + path + "'");
    KeyHeader h = parse_key_header(in, path);

    PsfKey key;
    key.config = h.config;
    key.mask = h.mask;
    key.z_planes = h.z_planes;
    key.offset_pitch = h.offset_pitch;
    key.offsets = h.offsets;
    key.window = h.window;
    key.psfs.reserve(h.psf_count);
    Fnv1a fnv;
    for (size_t i = 0; i < h.psf_count; ++i)
        key.psfs.push_back(read_psf_block(in, h.window, fnv, path));
    if (fnv.value() != h.checksum)
        throw IoError("key container checksum mismatch (file corrupt or edited)");
    key.checksum = h.checksum;
    return key;
}

struct PsfKeyReader::Impl {
    std::ifstream in;
    std::string path;
    KeyHeader header;
    size_t next_plane = 0;
    Fnv1a fnv;
};

PsfKeyReader::PsfKeyReader(const std::string& path) : impl_(new Impl) {
    impl_->in.open(path, std::ios::binary);
    if (!impl_->in) throw IoError("cannot open key file '" + path + "'");
    impl_->path = path;
    impl_->header = parse_key_header(impl_->in, path);
}

PsfKeyReader::~PsfKeyReader() = default;

const OpticalConfig& PsfKeyReader::config() const { return impl_->header.config; }
const MaskSpec& PsfKeyReader::mask() const { return impl_->header.mask; }
const std::vector<double>& PsfKeyReader::z_planes() const {
    return impl_->header.z_planes;
}
double PsfKeyReader::offset_pitch() const { return impl_->header.offset_pitch; }
int PsfKeyReader::offsets() const { return impl_->header.offsets; }
int PsfKeyReader::window() const { return impl_->header.window; }
uint64_t PsfKeyReader::checksum() const { return impl_->header.checksum; }

PsfKey PsfKeyReader::read_plane() {
    const KeyHeader& h = impl_->header;
    if (impl_->next_plane >= h.z_planes.size())
        throw UsageError("all key planes already read");
    PsfKey key;
    key.config = h.config;
    key.mask = h.mask;
    key.z_planes = {h.z_planes[impl_->next_plane]};
    key.offset_pitch = h.offset_pitch;
    key.offsets = h.offsets;
    key.window = h.window;
    size_t per_plane = size_t(h.offsets) * h.offsets;
    key.psfs.reserve(per_plane);
    Fnv1a plane_fnv;
    for (size_t i = 0; i < per_plane; ++i)
        key.psfs.push_back(
            read_psf_block(impl_->in, h.window, impl_->fnv, impl_->path, &plane_fnv));
    key.checksum = plane_fnv.value();
    ++impl_->next_plane;
    if (impl_->next_plane == h.z_planes.size() && impl_->fnv.value() != h.checksum)
        throw IoError("key container checksum mismatch (file corrupt or edited)");
    return key;
}

PsfKey perturb_key(const PsfKey& key, double fraction, uint64_t seed) {
    if (fraction < 0) throw UsageError("perturbation fraction must be nonnegative");
    PsfKey out = key;
    for (size_t pi = 0; pi < out.psfs.size(); ++pi) {
        auto& a = out.psfs[pi].a;
        for (size_t e = 0; e < a.size(); ++e) {
            double u = 2.0 * uniform01(seed, rng_role::perturb, pi, e) - 1.0;
            double m = 1.0 + fraction * u;
            a[e] *= std::max(0.0, m);
        }
    }
    out.checksum = psf_key_checksum(out);
    return out;
}

}  // namespace lfc
