// pybind11 module exposing the toolkit's main operations. Arrays cross the
// boundary as numpy ndarrays (copies, C order): volumes are (nz, ny, nx),
// images (ny, nx), bit planes (bits, ny, nx).

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "lfc/attack.hpp"
#include "lfc/correlate.hpp"
#include "lfc/deconv.hpp"
#include "lfc/digitize.hpp"
#include "lfc/errors.hpp"
#include "lfc/forward.hpp"
#include "lfc/mask.hpp"
#include "lfc/psf.hpp"
#include "lfc/scenes.hpp"
#include "lfc/volume.hpp"

namespace py = pybind11;
using namespace lfc;
using namespace pybind11::literals;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> array2(const std::vector<double>& v, int ny, int nx) {
    py::array_t<double> a({ny, nx});
    std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(double));
    return a;
}

py::array_t<double> array3(const std::vector<double>& v, int nz, int ny, int nx) {
    py::array_t<double> a({nz, ny, nx});
    std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(double));
    return a;
}

Volume make_volume(const VolumeGrid& grid, std::vector<double> z, DoubleArray values) {
    Volume v;
    v.grid = grid;
    v.z = std::move(z);
    if (values.ndim() != 3 || values.shape(0) != py::ssize_t(v.z.size()) ||
        values.shape(1) != grid.ny || values.shape(2) != grid.nx)
        throw UsageError("values must have shape (nz, ny, nx) matching grid and z");
    v.v.assign(values.data(), values.data() + values.size());
    return v;
}

LightFieldImage make_image(DoubleArray values, double pixel) {
    if (values.ndim() != 2) throw UsageError("image values must be 2-d");
    LightFieldImage img;
    img.ny = int(values.shape(0));
    img.nx = int(values.shape(1));
    img.pixel = pixel;
    img.v.assign(values.data(), values.data() + values.size());
    return img;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "volumetric light-field encryption core";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<OpticalConfig>(m, "OpticalConfig")
        .def(py::init<>())
        .def_readwrite("na", &OpticalConfig::na)
        .def_readwrite("magnification", &OpticalConfig::magnification)
        .def_readwrite("refractive_index", &OpticalConfig::refractive_index)
        .def_readwrite("wavelength", &OpticalConfig::wavelength)
        .def_readwrite("lenslet_pitch", &OpticalConfig::lenslet_pitch)
        .def_readwrite("lenslet_focal", &OpticalConfig::lenslet_focal)
        .def_readwrite("mask_pixel", &OpticalConfig::mask_pixel)
        .def_readwrite("sensor_pixel", &OpticalConfig::sensor_pixel)
        .def_readwrite("psf_samples", &OpticalConfig::psf_samples)
        .def_readwrite("theta_steps", &OpticalConfig::theta_steps)
        .def_readwrite("crop_threshold", &OpticalConfig::crop_threshold)
        .def("validate", &OpticalConfig::validate);

    py::enum_<MaskKind>(m, "MaskKind")
        .value("none", MaskKind::none)
        .value("phase", MaskKind::phase)
        .value("amplitude", MaskKind::amplitude);

    py::enum_<AmplitudeLaw>(m, "AmplitudeLaw")
        .value("binary", AmplitudeLaw::binary)
        .value("uniform", AmplitudeLaw::uniform);

    py::class_<MaskSpec>(m, "MaskSpec")
        .def(py::init<>())
        .def_readwrite("kind", &MaskSpec::kind)
        .def_readwrite("seed", &MaskSpec::seed)
        .def_readwrite("law", &MaskSpec::law)
        .def_readwrite("sensor_mask", &MaskSpec::sensor_mask)
        .def_readwrite("sensor_seed", &MaskSpec::sensor_seed);

    py::class_<SamplingCheck>(m, "SamplingCheck")
        .def_readonly("ok", &SamplingCheck::ok)
        .def_readonly("threshold", &SamplingCheck::threshold);
    m.def("validate_sampling", &validate_sampling, "distance"_a, "sample_interval"_a,
          "n_samples"_a, "wavelength"_a);

    py::class_<VolumeGrid>(m, "VolumeGrid")
        .def(py::init<>())
        .def_static("centered", &VolumeGrid::centered, "nx"_a, "ny"_a, "pitch"_a)
        .def_readwrite("nx", &VolumeGrid::nx)
        .def_readwrite("ny", &VolumeGrid::ny)
        .def_readwrite("pitch", &VolumeGrid::pitch)
        .def_readwrite("origin_x", &VolumeGrid::origin_x)
        .def_readwrite("origin_y", &VolumeGrid::origin_y);

    py::class_<Volume>(m, "Volume")
        .def(py::init(&make_volume), "grid"_a, "z"_a, "values"_a)
        .def_readonly("grid", &Volume::grid)
        .def_readonly("z", &Volume::z)
        .def_property_readonly("values", [](const Volume& v) {
            return array3(v.v, v.nz(), v.grid.ny, v.grid.nx);
        });

    py::class_<LightFieldImage>(m, "LightFieldImage")
        .def(py::init(&make_image), "values"_a, "pixel"_a = 0.0)
        .def_readonly("ny", &LightFieldImage::ny)
        .def_readonly("nx", &LightFieldImage::nx)
        .def_readonly("pixel", &LightFieldImage::pixel)
        .def_readwrite("meta", &LightFieldImage::meta)
        .def_property_readonly("values",
                               [](const LightFieldImage& i) {
                                   return array2(i.v, i.ny, i.nx);
                               })
        .def_property_readonly("mask", [](const LightFieldImage& i) -> py::object {
            if (i.mask.empty()) return py::none();
            py::array_t<uint8_t> a({i.ny, i.nx});
            std::memcpy(a.mutable_data(), i.mask.data(), i.mask.size());
            return a;
        });

    py::class_<PsfKey>(m, "PsfKey")
        .def_readonly("config", &PsfKey::config)
        .def_readonly("mask", &PsfKey::mask)
        .def_readonly("z_planes", &PsfKey::z_planes)
        .def_readonly("offset_pitch", &PsfKey::offset_pitch)
        .def_readonly("offsets", &PsfKey::offsets)
        .def_readonly("window", &PsfKey::window)
        .def_readonly("checksum", &PsfKey::checksum)
        .def_property_readonly("count", &PsfKey::count)
        .def("psf", [](const PsfKey& k, int zi, int qy, int qx) {
            if (zi < 0 || size_t(zi) >= k.z_planes.size() || qy < 0 || qy >= k.offsets ||
                qx < 0 || qx >= k.offsets)
                throw UsageError("psf index out of range");
            const SparsePsf& p = k.psf(zi, qy, qx);
            std::vector<double> dense(size_t(k.window) * k.window, 0.0);
            for (int r = 0; r < p.h; ++r)
                for (int c = 0; c < p.w; ++c)
                    dense[size_t(p.r0 + r) * k.window + (p.c0 + c)] =
                        p.a[size_t(r) * p.w + c];
            return array2(dense, k.window, k.window);
        }, "zi"_a, "qy"_a, "qx"_a, "one point spread as a dense (window, window) array");

    m.def("build_psf_key", &build_psf_key, "config"_a, "mask"_a, "z_planes"_a,
          "voxel_pitch"_a, py::call_guard<py::gil_scoped_release>());
    m.def("offsets_per_period", &offsets_per_period, "config"_a, "voxel_pitch"_a);
    m.def("save_psf_key", &save_psf_key, "key"_a, "path"_a);
    m.def("load_psf_key", &load_psf_key, "path"_a,
          py::call_guard<py::gil_scoped_release>());
    m.def("perturb_key", &perturb_key, "key"_a, "fraction"_a, "seed"_a);

    m.def("default_sensor_side",
          py::overload_cast<const VolumeGrid&, const PsfKey&>(&default_sensor_side),
          "grid"_a, "key"_a);
    m.def(
        "encrypt",
        [](const Volume& vol, const PsfKey& key, int sensor_side, int quant_bits) {
            EncryptOptions opt;
            opt.sensor_side = sensor_side;
            opt.quant_bits = quant_bits;
            py::gil_scoped_release release;
            return encrypt(vol, key, opt);
        },
        "volume"_a, "key"_a, "sensor_side"_a = 0, "quant_bits"_a = 0);
    m.def("apply_forward", &apply_forward, "volume"_a, "key"_a, "sensor_side"_a,
          py::call_guard<py::gil_scoped_release>());
    m.def("apply_adjoint", &apply_adjoint, "image"_a, "key"_a, "grid"_a,
          py::call_guard<py::gil_scoped_release>());

    py::enum_<OccludeMode>(m, "OccludeMode")
        .value("corner", OccludeMode::corner)
        .value("random", OccludeMode::random);
    m.def("occlude", &occlude, "image"_a, "fraction"_a, "mode"_a, "seed"_a = 0,
          "zero a fraction of the pixels in place and mark them invalid");

    py::class_<DeconvSettings> ds(m, "DeconvSettings");
    py::enum_<DeconvSettings::Init>(ds, "Init")
        .value("ones", DeconvSettings::Init::ones)
        .value("adjoint", DeconvSettings::Init::adjoint);
    ds.def(py::init([](int iterations, double floor_epsilon, double threshold_fraction,
                       DeconvSettings::Init init, bool use_mask) {
               DeconvSettings s;
               s.iterations = iterations;
               s.floor_epsilon = floor_epsilon;
               s.threshold_fraction = threshold_fraction;
               s.init = init;
               s.use_mask = use_mask;
               return s;
           }),
           "iterations"_a = 8, "floor_epsilon"_a = 1e-12, "threshold_fraction"_a = 0.0,
           "init"_a = DeconvSettings::Init::ones, "use_mask"_a = true)
        .def_readwrite("iterations", &DeconvSettings::iterations)
        .def_readwrite("floor_epsilon", &DeconvSettings::floor_epsilon)
        .def_readwrite("threshold_fraction", &DeconvSettings::threshold_fraction)
        .def_readwrite("init", &DeconvSettings::init)
        .def_readwrite("use_mask", &DeconvSettings::use_mask);

    py::class_<IterationRecord>(m, "IterationRecord")
        .def_readonly("index", &IterationRecord::index)
        .def_readonly("residual", &IterationRecord::residual)
        .def_readonly("gmin", &IterationRecord::gmin)
        .def_readonly("gmax", &IterationRecord::gmax);

    py::enum_<DeconvStatus>(m, "DeconvStatus")
        .value("ok", DeconvStatus::ok)
        .value("zero_image", DeconvStatus::zero_image);

    py::class_<DeconvResult>(m, "DeconvResult")
        .def_readonly("volume", &DeconvResult::volume)
        .def_readonly("status", &DeconvResult::status)
        .def_readonly("iterations", &DeconvResult::iterations);

    m.def(
        "decrypt",
        [](const LightFieldImage& img, const PsfKey& key, const VolumeGrid& grid,
           const DeconvSettings& settings) {
            py::gil_scoped_release release;
            return decrypt(img, key, grid, settings);
        },
        "image"_a, "key"_a, "grid"_a, "settings"_a = DeconvSettings{});

    py::class_<BinaryPlaneSet>(m, "BinaryPlaneSet")
        .def_readonly("ny", &BinaryPlaneSet::ny)
        .def_readonly("nx", &BinaryPlaneSet::nx)
        .def_readonly("bits", &BinaryPlaneSet::bits)
        .def_readonly("peak", &BinaryPlaneSet::peak)
        .def_readonly("pixel", &BinaryPlaneSet::pixel)
        .def_readonly("meta", &BinaryPlaneSet::meta)
        .def_property_readonly("planes", [](const BinaryPlaneSet& p) {
            py::array_t<uint8_t> a({p.bits, p.ny, p.nx});
            for (int b = 0; b < p.bits; ++b)
                std::memcpy(a.mutable_data(b, 0, 0), p.planes[size_t(b)].data(),
                            p.planes[size_t(b)].size());
            return a;
        });
    m.def("digitize", &digitize, "image"_a, "bits"_a);
    m.def("reassemble", &reassemble, "planes"_a);
    m.def("save_planes", &save_planes, "planes"_a, "path"_a);
    m.def("load_planes", &load_planes, "path"_a);

    py::class_<Correlation>(m, "Correlation")
        .def_readonly("c", &Correlation::c)
        .def_readonly("dy", &Correlation::dy)
        .def_readonly("dx", &Correlation::dx);
    m.def(
        "normalized_correlation",
        [](DoubleArray ref, DoubleArray rec, int max_shift) {
            if (ref.ndim() != 2 || rec.ndim() != 2)
                throw UsageError("correlation inputs must be 2-d");
            std::vector<double> a(ref.data(), ref.data() + ref.size());
            std::vector<double> b(rec.data(), rec.data() + rec.size());
            return normalized_correlation(a, b, int(ref.shape(0)), int(ref.shape(1)),
                                          max_shift);
        },
        "ref"_a, "rec"_a, "max_shift"_a = 0);
    m.def("per_plane_correlation", &per_plane_correlation, "ref"_a, "rec"_a,
          "max_shift"_a = 0);

    py::class_<AttackSettings>(m, "AttackSettings")
        .def(py::init<>())
        .def_readwrite("occlusion_fractions", &AttackSettings::occlusion_fractions)
        .def_readwrite("perturb_fractions", &AttackSettings::perturb_fractions)
        .def_readwrite("deconv", &AttackSettings::deconv)
        .def_readwrite("occlude_mode", &AttackSettings::occlude_mode)
        .def_readwrite("occlude_seed", &AttackSettings::occlude_seed)
        .def_readwrite("perturb_seed", &AttackSettings::perturb_seed)
        .def_readwrite("max_shift", &AttackSettings::max_shift);
    py::class_<AttackEntry>(m, "AttackEntry")
        .def_readonly("name", &AttackEntry::name)
        .def_readonly("occlusion_fraction", &AttackEntry::occlusion_fraction)
        .def_readonly("perturb_fraction", &AttackEntry::perturb_fraction)
        .def_readonly("plane_index", &AttackEntry::plane_index)
        .def_readonly("plane_c", &AttackEntry::plane_c)
        .def_readonly("plane_dy", &AttackEntry::plane_dy)
        .def_readonly("plane_dx", &AttackEntry::plane_dx)
        .def_readonly("reconstruction", &AttackEntry::reconstruction);
    py::class_<AttackReport>(m, "AttackReport")
        .def_readonly("image", &AttackReport::image)
        .def_readonly("entries", &AttackReport::entries);
    m.def("run_attack_suite", &run_attack_suite, "scene"_a, "key"_a, "settings"_a,
          py::call_guard<py::gil_scoped_release>());

    m.def("demo_scene", &demo_scene, "name"_a, "grid"_a, "z_planes"_a);
    m.def("demo_scene_names", &demo_scene_names);

    m.def("save_volume", &save_volume, "volume"_a, "path"_a);
    m.def("load_volume", &load_volume, "path"_a);
    m.def("save_image", &save_image, "image"_a, "path"_a);
    m.def("load_image", &load_image, "path"_a);
    m.def("image_to_png", &image_to_png, "image"_a, "path"_a);
}
