// lfcrypt: command-line front end for the volumetric light-field
// encryption toolkit. Subcommands cover the whole pipeline: key
// generation, encryption, decryption, bit-plane digitization, demo
// scenes, robustness sweeps and correlation scoring.
//
// Exit codes: 0 success, 2 usage, 3 config/sampling, 4 I/O, 5 numerical.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lfc/attack.hpp"
#include "lfc/correlate.hpp"
#include "lfc/deconv.hpp"
#include "lfc/digitize.hpp"
#include "lfc/errors.hpp"
#include "lfc/forward.hpp"
#include "lfc/psf.hpp"
#include "lfc/scenes.hpp"
#include "lfc/volume.hpp"

using nlohmann::json;
using namespace lfc;

namespace {

// shortest decimal string that parses back to exactly the same double
std::string fmt_num(double v) {
    char buf[40];
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_num(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (...) {
    }
    throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
}

long to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long n = std::stol(v, &pos);
        if (pos == v.size()) return n;
    } catch (...) {
    }
    throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
}

uint64_t to_seed(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        uint64_t n = std::stoull(v, &pos);
        if (pos == v.size()) return n;
    } catch (...) {
    }
    throw ConfigError("config key '" + key + "' expects an unsigned integer, got '" + v +
                      "'");
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "' expects 0 or 1, got '" + v + "'");
}

std::string kind_str(MaskKind k) {
    switch (k) {
        case MaskKind::none: return "none";
        case MaskKind::phase: return "phase";
        case MaskKind::amplitude: return "amplitude";
    }
    return "?";
}

MaskKind kind_parse(const std::string& key, const std::string& v) {
    if (v == "none") return MaskKind::none;
    if (v == "phase") return MaskKind::phase;
    if (v == "amplitude") return MaskKind::amplitude;
    throw ConfigError("config key '" + key + "' expects none, phase or amplitude");
}

std::string law_str(AmplitudeLaw l) {
    return l == AmplitudeLaw::binary ? "binary" : "uniform";
}

AmplitudeLaw law_parse(const std::string& key, const std::string& v) {
    if (v == "binary") return AmplitudeLaw::binary;
    if (v == "uniform") return AmplitudeLaw::uniform;
    throw ConfigError("config key '" + key + "' expects binary or uniform");
}

std::string init_str(DeconvSettings::Init i) {
    return i == DeconvSettings::Init::ones ? "ones" : "adjoint";
}

DeconvSettings::Init init_parse(const std::string& key, const std::string& v) {
    if (v == "ones") return DeconvSettings::Init::ones;
    if (v == "adjoint") return DeconvSettings::Init::adjoint;
    throw ConfigError("config key '" + key + "' expects ones or adjoint");
}

// All run settings in one flat bag: optics, mask, volume grid, encryption
// and deconvolution knobs. Defaults reproduce the reference configuration
// (128 x 128 lateral voxels at 0.25 um, 26 depth planes every 2 um from
// -60 um).
struct RunConfig {
    OpticalConfig optics;
    MaskSpec mask;
    int grid_nx = 128, grid_ny = 128;
    double grid_pitch = 0.25e-6;
    double z_min = -60e-6, z_step = 2e-6;
    int z_count = 26;
    std::vector<double> z_explicit;  // overrides the uniform range when set
    int sensor_side = 0;             // 0 = twice the volume footprint
    int quant_bits = 0;              // 0 = no quantization
    DeconvSettings deconv;
    std::set<std::string> seen;  // keys set via file or --set

    std::vector<double> z_list() const {
        if (!z_explicit.empty()) return z_explicit;
        if (z_count < 1) throw ConfigError("z_count must be at least 1");
        std::vector<double> zs(static_cast<size_t>(z_count));
        for (int i = 0; i < z_count; ++i) zs[size_t(i)] = z_min + i * z_step;
        return zs;
    }
};

struct KeyDef {
    const char* key;
    const char* help;
    std::string (*get)(const RunConfig&);
    void (*set)(RunConfig&, const std::string&);
};

const std::vector<KeyDef>& schema() {
    static const std::vector<KeyDef> defs = {
        {"na", "objective numerical aperture",
         [](const RunConfig& c) { return fmt_num(c.optics.na); },
         [](RunConfig& c, const std::string& v) { c.optics.na = to_num("na", v); }},
        {"magnification", "objective magnification",
         [](const RunConfig& c) { return fmt_num(c.optics.magnification); },
         [](RunConfig& c, const std::string& v) {
             c.optics.magnification = to_num("magnification", v);
         }},
        {"refractive_index", "immersion refractive index",
         [](const RunConfig& c) { return fmt_num(c.optics.refractive_index); },
         [](RunConfig& c, const std::string& v) {
             c.optics.refractive_index = to_num("refractive_index", v);
         }},
        {"wavelength", "illumination wavelength, meters",
         [](const RunConfig& c) { return fmt_num(c.optics.wavelength); },
         [](RunConfig& c, const std::string& v) {
             c.optics.wavelength = to_num("wavelength", v);
         }},
        {"lenslet_pitch", "microlens pitch, meters",
         [](const RunConfig& c) { return fmt_num(c.optics.lenslet_pitch); },
         [](RunConfig& c, const std::string& v) {
             c.optics.lenslet_pitch = to_num("lenslet_pitch", v);
         }},
        {"lenslet_focal", "microlens focal length, meters",
         [](const RunConfig& c) { return fmt_num(c.optics.lenslet_focal); },
         [](RunConfig& c, const std::string& v) {
             c.optics.lenslet_focal = to_num("lenslet_focal", v);
         }},
        {"mask_pixel", "simulation grid interval at the lenslet plane, meters",
         [](const RunConfig& c) { return fmt_num(c.optics.mask_pixel); },
         [](RunConfig& c, const std::string& v) {
             c.optics.mask_pixel = to_num("mask_pixel", v);
         }},
        {"sensor_pixel", "sensor bin size, odd multiple of mask_pixel, meters",
         [](const RunConfig& c) { return fmt_num(c.optics.sensor_pixel); },
         [](RunConfig& c, const std::string& v) {
             c.optics.sensor_pixel = to_num("sensor_pixel", v);
         }},
        {"psf_samples", "simulated window side in grid samples, odd",
         [](const RunConfig& c) { return std::to_string(c.optics.psf_samples); },
         [](RunConfig& c, const std::string& v) {
             c.optics.psf_samples = int(to_int("psf_samples", v));
         }},
        {"theta_steps", "aperture integral subdivisions",
         [](const RunConfig& c) { return std::to_string(c.optics.theta_steps); },
         [](RunConfig& c, const std::string& v) {
             c.optics.theta_steps = int(to_int("theta_steps", v));
         }},
        {"crop_threshold", "point spreads drop values below this fraction of the peak",
         [](const RunConfig& c) { return fmt_num(c.optics.crop_threshold); },
         [](RunConfig& c, const std::string& v) {
             c.optics.crop_threshold = to_num("crop_threshold", v);
         }},
        {"mask_kind", "random mask type: none, phase or amplitude",
         [](const RunConfig& c) { return kind_str(c.mask.kind); },
         [](RunConfig& c, const std::string& v) {
             c.mask.kind = kind_parse("mask_kind", v);
         }},
        {"mask_seed", "random mask seed",
         [](const RunConfig& c) { return std::to_string(c.mask.seed); },
         [](RunConfig& c, const std::string& v) {
             c.mask.seed = to_seed("mask_seed", v);
         }},
        {"amplitude_law", "amplitude mask law: binary or uniform",
         [](const RunConfig& c) { return law_str(c.mask.law); },
         [](RunConfig& c, const std::string& v) {
             c.mask.law = law_parse("amplitude_law", v);
         }},
        {"sensor_mask", "0/1: extra binary amplitude mask at the sensor plane",
         [](const RunConfig& c) { return std::string(c.mask.sensor_mask ? "1" : "0"); },
         [](RunConfig& c, const std::string& v) {
             c.mask.sensor_mask = to_bool("sensor_mask", v);
         }},
        {"sensor_seed", "sensor mask seed",
         [](const RunConfig& c) { return std::to_string(c.mask.sensor_seed); },
         [](RunConfig& c, const std::string& v) {
             c.mask.sensor_seed = to_seed("sensor_seed", v);
         }},
        {"grid_nx", "lateral voxels along x",
         [](const RunConfig& c) { return std::to_string(c.grid_nx); },
         [](RunConfig& c, const std::string& v) { c.grid_nx = int(to_int("grid_nx", v)); }},
        {"grid_ny", "lateral voxels along y",
         [](const RunConfig& c) { return std::to_string(c.grid_ny); },
         [](RunConfig& c, const std::string& v) { c.grid_ny = int(to_int("grid_ny", v)); }},
        {"grid_pitch", "lateral voxel pitch, meters",
         [](const RunConfig& c) { return fmt_num(c.grid_pitch); },
         [](RunConfig& c, const std::string& v) {
             c.grid_pitch = to_num("grid_pitch", v);
         }},
        {"z_min", "first depth plane, meters",
         [](const RunConfig& c) { return fmt_num(c.z_min); },
         [](RunConfig& c, const std::string& v) { c.z_min = to_num("z_min", v); }},
        {"z_step", "depth plane spacing, meters",
         [](const RunConfig& c) { return fmt_num(c.z_step); },
         [](RunConfig& c, const std::string& v) { c.z_step = to_num("z_step", v); }},
        {"z_count", "number of depth planes",
         [](const RunConfig& c) { return std::to_string(c.z_count); },
         [](RunConfig& c, const std::string& v) { c.z_count = int(to_int("z_count", v)); }},
        {"z_planes", "explicit comma-separated depths, meters (overrides the range)",
         [](const RunConfig& c) {
             std::string s;
             for (size_t i = 0; i < c.z_explicit.size(); ++i) {
                 if (i) s += ",";
                 s += fmt_num(c.z_explicit[i]);
             }
             return s;
         },
         [](RunConfig& c, const std::string& v) {
             c.z_explicit.clear();
             std::stringstream ss(v);
             std::string piece;
             while (std::getline(ss, piece, ',')) {
                 piece = trim(piece);
                 if (!piece.empty()) c.z_explicit.push_back(to_num("z_planes", piece));
             }
         }},
        {"sensor_side", "sensor pixels per side, 0 = twice the volume footprint",
         [](const RunConfig& c) { return std::to_string(c.sensor_side); },
         [](RunConfig& c, const std::string& v) {
             c.sensor_side = int(to_int("sensor_side", v));
         }},
        {"quant_bits", "encryption quantization depth in bits, 0 = off",
         [](const RunConfig& c) { return std::to_string(c.quant_bits); },
         [](RunConfig& c, const std::string& v) {
             c.quant_bits = int(to_int("quant_bits", v));
         }},
        {"iterations", "deconvolution iterations",
         [](const RunConfig& c) { return std::to_string(c.deconv.iterations); },
         [](RunConfig& c, const std::string& v) {
             c.deconv.iterations = int(to_int("iterations", v));
         }},
        {"floor_epsilon", "denominator floor as a fraction of its maximum",
         [](const RunConfig& c) { return fmt_num(c.deconv.floor_epsilon); },
         [](RunConfig& c, const std::string& v) {
             c.deconv.floor_epsilon = to_num("floor_epsilon", v);
         }},
        {"threshold", "final cut as a fraction of the reconstruction peak",
         [](const RunConfig& c) { return fmt_num(c.deconv.threshold_fraction); },
         [](RunConfig& c, const std::string& v) {
             c.deconv.threshold_fraction = to_num("threshold", v);
         }},
        {"init", "deconvolution start: ones or adjoint",
         [](const RunConfig& c) { return init_str(c.deconv.init); },
         [](RunConfig& c, const std::string& v) {
             c.deconv.init = init_parse("init", v);
         }},
        {"use_mask", "0/1: exclude occluded pixels from the adjoint sums",
         [](const RunConfig& c) { return std::string(c.deconv.use_mask ? "1" : "0"); },
         [](RunConfig& c, const std::string& v) {
             c.deconv.use_mask = to_bool("use_mask", v);
         }},
    };
    return defs;
}

void apply_kv(RunConfig& rc, const std::string& key, const std::string& value) {
    for (const KeyDef& d : schema()) {
        if (key == d.key) {
            d.set(rc, value);
            rc.seen.insert(key);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void load_config_file(RunConfig& rc, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(ln) + ": expected key = value");
        apply_kv(rc, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void print_defaults(std::ostream& out) {
    RunConfig def;
    out << "# lfcrypt configuration: key = value, '#' starts a comment.\n";
    out << "# Defaults reproduce the reference setup.\n";
    for (const KeyDef& d : schema()) {
        std::string line = std::string(d.key) + " = " + d.get(def);
        if (line.size() < 26) line.resize(26, ' ');
        out << line << "  # " << d.help << "\n";
    }
}

// Fail fast before any wave computation: optics constraints, the spectral
// sampling gate for the lenslet-to-sensor propagation, and offset grid
// commensurability.
void validate_run(const RunConfig& rc) {
    rc.optics.validate();
    SamplingCheck sc = validate_sampling(rc.optics.lenslet_focal, rc.optics.mask_pixel,
                                         rc.optics.psf_samples, rc.optics.wavelength);
    if (!sc.ok)
        throw ConfigError("mask_pixel " + fmt_num(rc.optics.mask_pixel) +
                          " m undersamples the propagation: the threshold is " +
                          fmt_num(sc.threshold) + " m for distance " +
                          fmt_num(rc.optics.lenslet_focal) + " m, " +
                          std::to_string(rc.optics.psf_samples) + " samples, wavelength " +
                          fmt_num(rc.optics.wavelength) + " m");
    if (rc.grid_nx < 1 || rc.grid_ny < 1)
        throw ConfigError("grid_nx and grid_ny must be at least 1");
    if (!(rc.grid_pitch > 0)) throw ConfigError("grid_pitch must be positive");
    offsets_per_period(rc.optics, rc.grid_pitch);
    rc.z_list();
}

std::ostream* open_sink(const std::string& spec, std::ofstream& file) {
    if (spec.empty()) return nullptr;
    if (spec == "-") return &std::cout;
    file.open(spec);
    if (!file) throw IoError("cannot open '" + spec + "' for writing");
    return &file;
}

void write_plane_png(const Volume& vol, int zi, const std::string& path) {
    LightFieldImage im;
    im.ny = vol.grid.ny;
    im.nx = vol.grid.nx;
    im.pixel = vol.grid.pitch;
    im.v.assign(vol.plane(zi), vol.plane(zi) + size_t(vol.grid.ny) * vol.grid.nx);
    image_to_png(im, path);
}

int cmd_keygen(const RunConfig& rc, const std::string& out) {
    validate_run(rc);
    std::vector<double> zs = rc.z_list();
    int P = offsets_per_period(rc.optics, rc.grid_pitch);
    PsfKeyWriter writer(out, rc.optics, rc.mask, zs, rc.grid_pitch);
    for (size_t zi = 0; zi < zs.size(); ++zi) {
        std::vector<SparsePsf> plane =
            build_psf_plane(rc.optics, rc.mask, zs[zi], rc.grid_pitch);
        for (const SparsePsf& p : plane) writer.write_psf(p);
        std::fprintf(stderr, "plane %zu/%zu (z = %s m): %d point spreads\n", zi + 1,
                     zs.size(), fmt_num(zs[zi]).c_str(), P * P);
    }
    uint64_t sum = writer.finish();
    std::printf("checksum %016llx\n", (unsigned long long)sum);
    std::fprintf(stderr, "wrote %s\n", out.c_str());
    return 0;
}

int cmd_encrypt(const RunConfig& rc, const std::string& vol_path,
                const std::string& key_path, const std::string& out,
                const std::string& png) {
    Volume vol = load_volume(vol_path);
    for (double v : vol.v)
        if (!(v >= 0.0)) throw UsageError("volume values must be nonnegative and finite");
    PsfKeyReader reader(key_path);
    if (vol.z.size() != reader.z_planes().size())
        throw UsageError("volume has " + std::to_string(vol.z.size()) +
                         " depth planes but the key has " +
                         std::to_string(reader.z_planes().size()));
    int side = rc.sensor_side > 0 ? rc.sensor_side
                                  : default_sensor_side(vol.grid, reader.config());
    LightFieldImage img;
    img.ny = img.nx = side;
    img.pixel = reader.config().sensor_pixel;
    img.v.assign(size_t(side) * side, 0.0);
    size_t plane_px = size_t(vol.grid.ny) * vol.grid.nx;
    for (size_t zi = 0; zi < vol.z.size(); ++zi) {
        PsfKey plane_key = reader.read_plane();
        Volume slab;
        slab.grid = vol.grid;
        slab.z = {vol.z[zi]};
        slab.v.assign(vol.plane(int(zi)), vol.plane(int(zi)) + plane_px);
        LightFieldImage part = apply_forward(slab, plane_key, side);
        for (size_t i = 0; i < img.v.size(); ++i) img.v[i] += part.v[i];
        std::fprintf(stderr, "plane %zu/%zu encrypted\n", zi + 1, vol.z.size());
    }
    annotate_encrypted(img, vol.grid, rc.quant_bits);
    save_image(img, out);
    if (!png.empty()) image_to_png(img, png);
    std::fprintf(stderr, "wrote %s (%d x %d)\n", out.c_str(), side, side);
    return 0;
}

VolumeGrid decrypt_grid(const LightFieldImage& img, const RunConfig& rc) {
    bool explicit_grid = rc.seen.count("grid_nx") && rc.seen.count("grid_ny") &&
                         rc.seen.count("grid_pitch");
    if (explicit_grid) return VolumeGrid::centered(rc.grid_nx, rc.grid_ny, rc.grid_pitch);
    const auto& m = img.meta;
    bool have_meta = m.count("grid_nx") && m.count("grid_ny") && m.count("grid_pitch") &&
                     m.count("grid_origin_x") && m.count("grid_origin_y");
    if (!have_meta)
        throw UsageError(
            "image carries no volume grid metadata; set grid_nx, grid_ny and "
            "grid_pitch explicitly");
    VolumeGrid g;
    g.nx = int(to_int("grid_nx", m.at("grid_nx")));
    g.ny = int(to_int("grid_ny", m.at("grid_ny")));
    g.pitch = to_num("grid_pitch", m.at("grid_pitch"));
    g.origin_x = to_num("grid_origin_x", m.at("grid_origin_x"));
    g.origin_y = to_num("grid_origin_y", m.at("grid_origin_y"));
    return g;
}

int cmd_decrypt(const RunConfig& rc, const std::string& img_path,
                const std::string& key_path, const std::string& out,
                const std::string& log, const std::string& png_prefix) {
    LightFieldImage img = load_image(img_path);
    PsfKey key = load_psf_key(key_path);
    VolumeGrid grid = decrypt_grid(img, rc);

    std::ofstream log_file;
    std::ostream* log_sink = open_sink(log, log_file);
    auto on_iter = [&](const IterationRecord& r) {
        if (!log_sink) return;
        json j{{"iteration", r.index},
               {"residual", r.residual},
               {"gmin", r.gmin},
               {"gmax", r.gmax}};
        *log_sink << j.dump() << "\n";
    };
    DeconvResult res = decrypt(img, key, grid, rc.deconv, on_iter);
    save_volume(res.volume, out);
    if (!png_prefix.empty())
        for (int zi = 0; zi < res.volume.nz(); ++zi)
            write_plane_png(res.volume, zi, png_prefix + "_z" + std::to_string(zi) + ".png");
    const char* status = res.status == DeconvStatus::zero_image ? "zero_image" : "ok";
    double last_res =
        res.iterations.empty() ? 0.0 : res.iterations.back().residual;
    std::fprintf(stderr, "status %s, %zu iterations, last residual %s, wrote %s\n", status,
                 res.iterations.size(), fmt_num(last_res).c_str(), out.c_str());
    return 0;
}

int cmd_digitize(const std::string& img_path, const std::string& out, int levels,
                 const std::string& png_prefix) {
    LightFieldImage img = load_image(img_path);
    BinaryPlaneSet planes = digitize(img, levels);
    save_planes(planes, out);
    if (!png_prefix.empty())
        for (int b = 0; b < planes.bits; ++b)
            plane_to_png(planes, b, png_prefix + "_b" + std::to_string(b) + ".png");
    std::fprintf(stderr, "wrote %s (%d bit planes, peak %s)\n", out.c_str(), planes.bits,
                 fmt_num(planes.peak).c_str());
    return 0;
}

int cmd_reassemble(const std::string& planes_path, const std::string& out,
                   const std::string& png) {
    BinaryPlaneSet planes = load_planes(planes_path);
    LightFieldImage img = reassemble(planes);
    save_image(img, out);
    if (!png.empty()) image_to_png(img, png);
    std::fprintf(stderr, "wrote %s (%d x %d from %d planes)\n", out.c_str(), img.nx,
                 img.ny, planes.bits);
    return 0;
}

int cmd_demo(const RunConfig& rc, const std::string& scene, const std::string& out) {
    if (rc.grid_nx < 1 || rc.grid_ny < 1)
        throw ConfigError("grid_nx and grid_ny must be at least 1");
    if (!(rc.grid_pitch > 0)) throw ConfigError("grid_pitch must be positive");
    VolumeGrid grid = VolumeGrid::centered(rc.grid_nx, rc.grid_ny, rc.grid_pitch);
    Volume vol = demo_scene(scene, grid, rc.z_list());
    save_volume(vol, out);
    std::fprintf(stderr, "wrote scene '%s' (%d x %d x %d voxels)\n", scene.c_str(),
                 grid.nx, grid.ny, vol.nz());
    return 0;
}

int cmd_attack(const RunConfig& rc, const std::string& vol_path,
               const std::string& key_path, const std::string& out_dir,
               const std::string& report, const AttackSettings& settings) {
    Volume scene = load_volume(vol_path);
    PsfKey key = load_psf_key(key_path);
    AttackReport rep = run_attack_suite(scene, key, settings);

    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create directory '" + out_dir + "'");
        save_image(rep.image, out_dir + "/ciphertext.lfi");
        for (const AttackEntry& e : rep.entries)
            save_volume(e.reconstruction, out_dir + "/recon_" + e.name + ".vol");
    }

    std::ofstream report_file;
    std::ostream* sink = open_sink(report.empty() ? "-" : report, report_file);
    for (const AttackEntry& e : rep.entries) {
        json planes = json::array();
        for (size_t i = 0; i < e.plane_index.size(); ++i)
            planes.push_back(json{{"plane", e.plane_index[i]},
                                  {"z", scene.z[size_t(e.plane_index[i])]},
                                  {"c", e.plane_c[i]},
                                  {"dy", e.plane_dy[i]},
                                  {"dx", e.plane_dx[i]}});
        json j{{"name", e.name},
               {"occlusion", e.occlusion_fraction},
               {"perturb", e.perturb_fraction},
               {"planes", planes}};
        *sink << j.dump() << "\n";
    }
    return 0;
}

int cmd_correlate(const std::string& ref_path, const std::string& rec_path, int max_shift,
                  const std::string& out) {
    Volume ref = load_volume(ref_path);
    Volume rec = load_volume(rec_path);
    if (ref.grid.nx != rec.grid.nx || ref.grid.ny != rec.grid.ny ||
        ref.z.size() != rec.z.size())
        throw UsageError("volumes do not share a grid");
    std::ofstream out_file;
    std::ostream* sink = open_sink(out.empty() ? "-" : out, out_file);
    size_t plane_px = size_t(ref.grid.ny) * ref.grid.nx;
    for (int zi = 0; zi < ref.nz(); ++zi) {
        const double* p = ref.plane(zi);
        auto [lo, hi] = std::minmax_element(p, p + plane_px);
        if (*lo == *hi) {
            json j{{"plane", zi}, {"z", ref.z[size_t(zi)]}, {"constant", true}};
            *sink << j.dump() << "\n";
            continue;
        }
        std::vector<double> a(p, p + plane_px);
        std::vector<double> b(rec.plane(zi), rec.plane(zi) + plane_px);
        Correlation c = normalized_correlation(a, b, ref.grid.ny, ref.grid.nx, max_shift);
        json j{{"plane", zi},
               {"z", ref.z[size_t(zi)]},
               {"c", c.c},
               {"dy", c.dy},
               {"dx", c.dx}};
        *sink << j.dump() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"volumetric light-field encryption toolkit"};
    app.require_subcommand(0, 1);

    bool defaults_flag = false;
    app.add_flag("--print-defaults", defaults_flag,
                 "print the default configuration and exit");

    std::string config_path;
    std::vector<std::string> sets;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--set", sets, "override one config key, key=value (repeatable)");
    };

    auto* keygen = app.add_subcommand("keygen", "build and write a decryption key");
    std::string kg_out;
    uint64_t kg_seed = 0;
    keygen->add_option("--out", kg_out, "key file to write")->required();
    auto* kg_seed_opt =
        keygen->add_option("--seed", kg_seed, "random mask seed (overrides mask_seed)");
    add_common(keygen);

    auto* encrypt_cmd =
        app.add_subcommand("encrypt", "project a volume into a ciphertext image");
    std::string en_vol, en_key, en_out, en_png;
    int en_side = 0, en_quant = 0;
    encrypt_cmd->add_option("--volume", en_vol, "input volume (.vol)")->required();
    encrypt_cmd->add_option("--key", en_key, "key file")->required();
    encrypt_cmd->add_option("--out", en_out, "ciphertext image to write (.lfi)")
        ->required();
    encrypt_cmd->add_option("--png", en_png, "also export a 16-bit grayscale png");
    auto* en_side_opt = encrypt_cmd->add_option(
        "--sensor-side", en_side, "sensor pixels per side (0 = twice the footprint)");
    auto* en_quant_opt =
        encrypt_cmd->add_option("--quant-bits", en_quant, "quantization depth, 0 = off");
    add_common(encrypt_cmd);

    auto* decrypt_cmd =
        app.add_subcommand("decrypt", "recover a volume from a ciphertext image");
    std::string de_img, de_key, de_out, de_log, de_png;
    int de_iters = 0;
    double de_threshold = 0.0;
    bool de_mask = true;
    std::string de_init;
    decrypt_cmd->add_option("--image", de_img, "ciphertext image (.lfi)")->required();
    decrypt_cmd->add_option("--key", de_key, "key file")->required();
    decrypt_cmd->add_option("--out", de_out, "volume to write (.vol)")->required();
    auto* de_iters_opt =
        decrypt_cmd->add_option("--iterations", de_iters, "deconvolution iterations");
    auto* de_thresh_opt = decrypt_cmd->add_option(
        "--threshold", de_threshold, "final cut as a fraction of the peak");
    auto* de_mask_opt = decrypt_cmd->add_option(
        "--occlusion-mask", de_mask, "honor the validity mask (1) or ignore it (0)");
    auto* de_init_opt =
        decrypt_cmd->add_option("--init", de_init, "start estimate: ones or adjoint");
    decrypt_cmd->add_option("--log", de_log, "iteration log as json lines ('-' = stdout)");
    decrypt_cmd->add_option("--png-prefix", de_png,
                            "export reconstruction planes as <prefix>_z<i>.png");
    add_common(decrypt_cmd);

    auto* digitize_cmd =
        app.add_subcommand("digitize", "split an image into binary bit planes");
    std::string di_img, di_out, di_png;
    int di_levels = 0;
    digitize_cmd->add_option("--image", di_img, "input image (.lfi)")->required();
    digitize_cmd->add_option("--out", di_out, "bit plane container to write (.bp)")
        ->required();
    digitize_cmd->add_option("--levels", di_levels, "bit depth (number of planes)")
        ->required();
    digitize_cmd->add_option("--png-prefix", di_png,
                             "export planes as <prefix>_b<i>.png");
    add_common(digitize_cmd);

    auto* reassemble_cmd =
        app.add_subcommand("reassemble", "rebuild an image from bit planes");
    std::string re_planes, re_out, re_png;
    reassemble_cmd->add_option("--planes", re_planes, "bit plane container (.bp)")
        ->required();
    reassemble_cmd->add_option("--out", re_out, "image to write (.lfi)")->required();
    reassemble_cmd->add_option("--png", re_png, "also export a 16-bit grayscale png");
    add_common(reassemble_cmd);

    auto* demo_cmd = app.add_subcommand("demo", "generate a built-in test volume");
    std::string dm_scene, dm_out;
    std::string scene_help = "scene name (";
    {
        auto names = demo_scene_names();
        for (size_t i = 0; i < names.size(); ++i)
            scene_help += (i ? ", " : "") + names[i];
        scene_help += ")";
    }
    demo_cmd->add_option("scene", dm_scene, scene_help)->required();
    demo_cmd->add_option("--out", dm_out, "volume to write (.vol)")->required();
    add_common(demo_cmd);

    auto* attack_cmd = app.add_subcommand(
        "attack", "occlusion and perturbed-key robustness sweep on one scene");
    std::string at_vol, at_key, at_dir, at_report;
    std::vector<double> at_occ{0.25, 0.375};
    std::vector<double> at_pert{0.05};
    std::string at_mode = "corner";
    uint64_t at_occ_seed = 7, at_pert_seed = 99;
    int at_iters = 0, at_shift = 0;
    attack_cmd->add_option("--volume", at_vol, "scene volume (.vol)")->required();
    attack_cmd->add_option("--key", at_key, "key file")->required();
    attack_cmd->add_option("--out-dir", at_dir,
                           "write ciphertext and reconstructions here");
    attack_cmd->add_option("--report", at_report, "json lines report ('-' = stdout)");
    attack_cmd->add_option("--occlusion", at_occ, "occluded fractions to test");
    attack_cmd->add_option("--perturb", at_pert, "key perturbation fractions to test");
    attack_cmd->add_option("--occlude-mode", at_mode, "corner or random");
    attack_cmd->add_option("--occlude-seed", at_occ_seed, "seed for random occlusion");
    attack_cmd->add_option("--perturb-seed", at_pert_seed, "seed for key perturbation");
    auto* at_iters_opt =
        attack_cmd->add_option("--iterations", at_iters, "deconvolution iterations");
    attack_cmd->add_option("--max-shift", at_shift,
                           "correlation search radius, 0 = default");
    add_common(attack_cmd);

    auto* correlate_cmd = app.add_subcommand(
        "correlate", "per-plane normalized correlation of two volumes");
    std::string co_ref, co_rec, co_out;
    int co_shift = 0;
    correlate_cmd->add_option("--ref", co_ref, "reference volume (.vol)")->required();
    correlate_cmd->add_option("--rec", co_rec, "reconstruction volume (.vol)")
        ->required();
    correlate_cmd->add_option("--max-shift", co_shift,
                              "correlation search radius, 0 = default");
    correlate_cmd->add_option("--out", co_out, "json lines output ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (defaults_flag) {
            print_defaults(std::cout);
            return 0;
        }
        RunConfig rc;
        if (!config_path.empty()) load_config_file(rc, config_path);
        for (const std::string& s : sets) {
            size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw UsageError("--set expects key=value, got '" + s + "'");
            apply_kv(rc, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        }

        if (app.got_subcommand(keygen)) {
            if (kg_seed_opt->count()) rc.mask.seed = kg_seed;
            return cmd_keygen(rc, kg_out);
        }
        if (app.got_subcommand(encrypt_cmd)) {
            if (en_side_opt->count()) rc.sensor_side = en_side;
            if (en_quant_opt->count()) rc.quant_bits = en_quant;
            return cmd_encrypt(rc, en_vol, en_key, en_out, en_png);
        }
        if (app.got_subcommand(decrypt_cmd)) {
            if (de_iters_opt->count()) rc.deconv.iterations = de_iters;
            if (de_thresh_opt->count()) rc.deconv.threshold_fraction = de_threshold;
            if (de_mask_opt->count()) rc.deconv.use_mask = de_mask;
            if (de_init_opt->count()) rc.deconv.init = init_parse("init", de_init);
            return cmd_decrypt(rc, de_img, de_key, de_out, de_log, de_png);
        }
        if (app.got_subcommand(digitize_cmd))
            return cmd_digitize(di_img, di_out, di_levels, di_png);
        if (app.got_subcommand(reassemble_cmd))
            return cmd_reassemble(re_planes, re_out, re_png);
        if (app.got_subcommand(demo_cmd)) return cmd_demo(rc, dm_scene, dm_out);
        if (app.got_subcommand(attack_cmd)) {
            AttackSettings settings;
            settings.occlusion_fractions = at_occ;
            settings.perturb_fractions = at_pert;
            settings.deconv = rc.deconv;
            if (at_iters_opt->count()) settings.deconv.iterations = at_iters;
            settings.encrypt.sensor_side = rc.sensor_side;
            settings.encrypt.quant_bits = rc.quant_bits;
            if (at_mode == "corner") settings.occlude_mode = OccludeMode::corner;
            else if (at_mode == "random") settings.occlude_mode = OccludeMode::random;
            else throw UsageError("--occlude-mode expects corner or random");
            settings.occlude_seed = at_occ_seed;
            settings.perturb_seed = at_pert_seed;
            settings.max_shift = at_shift;
            return cmd_attack(rc, at_vol, at_key, at_dir, at_report, settings);
        }
        if (app.got_subcommand(correlate_cmd))
            return cmd_correlate(co_ref, co_rec, co_shift, co_out);

        std::cerr << app.help();
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
