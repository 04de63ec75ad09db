// patcli: command-line front end for the photoacoustic toolkit.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pat/datastore.hpp"
#include "pat/error.hpp"
#include "pat/export.hpp"
#include "pat/geometry.hpp"
#include "pat/metrics.hpp"
#include "pat/pgm.hpp"
#include "pat/phantoms.hpp"
#include "pat/pixelwise.hpp"
#include "pat/random.hpp"
#include "pat/recon.hpp"
#include "pat/wavesim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Raised for flag values that parse but violate a module precondition.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Setup {
    int height = 128;
    int width = 128;
    double dx = pat::Grid::kDefaultDx;
    double cfl = pat::SimConfig::kDefaultCfl;
    double sound_speed = 1500.0;
    double density = 1000.0;
    int sensors = 32;
    double diameter = 120.0;
    std::string aperture = "semicircle";
    int n_steps = 0;
    int pad_factor = 0;
    std::uint64_t seed = 0;
};

struct Geometry {
    pat::Grid grid;
    pat::SensorArray sensors;
    pat::SimConfig sim;
};

void add_setup_options(CLI::App& cmd, Setup& s, bool with_sensors = true) {
    cmd.add_option("--height", s.height, "Grid rows")->capture_default_str();
    cmd.add_option("--width", s.width, "Grid columns")->capture_default_str();
    cmd.add_option("--dx", s.dx, "Grid spacing in metres")->envname("PAT_DX")->capture_default_str();
    cmd.add_option("--seed", s.seed, "Seed for every random choice")->capture_default_str();
    if (!with_sensors) return;
    cmd.add_option("--cfl", s.cfl, "c dt / dx")->envname("PAT_CFL")->capture_default_str();
    cmd.add_option("--sound-speed", s.sound_speed, "Sound speed in m/s")->capture_default_str();
    cmd.add_option("--density", s.density, "Density in kg/m^3")->capture_default_str();
    cmd.add_option("--sensors", s.sensors, "Number of detectors")->capture_default_str();
    cmd.add_option("--diameter", s.diameter, "Aperture diameter in pixels")->capture_default_str();
    cmd.add_option("--aperture", s.aperture, "semicircle or full_ring")
        ->check(CLI::IsMember({"semicircle", "full_ring", "ring"}))
        ->capture_default_str();
    cmd.add_option("--steps", s.n_steps, "Time samples (0 = automatic)")->capture_default_str();
    cmd.add_option("--pad-factor", s.pad_factor, "Padded grid multiple (0 = automatic)")
        ->capture_default_str();
}

Geometry make_geometry(const Setup& s) {
    try {
        pat::Grid grid(s.height, s.width, s.dx);
        pat::SimConfig sim;
        sim.medium = {s.sound_speed, s.density};
        sim.cfl = s.cfl;
        sim.n_steps = s.n_steps;
        sim.pad_factor = s.pad_factor;
        sim.validate();
        auto sensors = pat::make_sensor_array(grid, s.sensors, s.diameter,
                                              pat::parse_aperture(s.aperture));
        return {grid, std::move(sensors), sim};
    } catch (const pat::Error& e) {
        throw UsageError(e.what());
    }
}

pat::Image synth_phantom(const Setup& s, std::uint64_t index) {
    if (s.height != s.width) throw UsageError("synthetic phantoms need a square grid");
    pat::AugmentConfig cfg;
    cfg.seed = s.seed;
    cfg.crop_size = s.height;
    return pat::augment(pat::synth_vasculature(s.seed), cfg, index);
}

// ---------------------------------------------------------------------------
// File formats. A path ending in .bin or .pgm is a single array; anything
// else is a dataset directory.

bool is_single_file(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".bin" || ext == ".pgm";
}

std::string item_name(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%06zu", prefix, i);
    return buf;
}

fs::path sidecar(const fs::path& p) { return fs::path(p).replace_extension(".json"); }

void write_json(const fs::path& p, const json& j) {
    std::ofstream f(p, std::ios::trunc);
    f << j.dump(2) << '\n';
    if (!f) throw pat::Error("failed to write " + p.string());
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw pat::Error("cannot open " + p.string());
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw pat::CorruptManifest(p.string() + ": " + e.what());
    }
}

void write_raw(const fs::path& p, const std::vector<float>& values) {
    const auto bytes = pat::encode_f32le(values);
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw pat::Error("failed to write " + p.string());
}

std::vector<float> read_raw(const fs::path& p, std::uint64_t count) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw pat::Error("cannot open " + p.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), {});
    if (bytes.size() != count * 4)
        throw pat::ShapeMismatch(p.string() + " holds " + std::to_string(bytes.size()) +
                                 " bytes, expected " + std::to_string(count * 4));
    return pat::decode_f32le(bytes);
}

json window_json(pat::Window w) { return json{{"lo", w.lo}, {"hi", w.hi}, {"mapping", "linear"}}; }

void write_image_file(const fs::path& p, const pat::Image& img, json meta) {
    const auto window = pat::minmax_window(img);
    if (p.extension() == ".pgm") {
        pat::write_pgm(p, img, window);
        return;
    }
    const pat::Tensor t = pat::image_tensor(img, "image", "image");
    write_raw(p, t.data);
    const fs::path preview = fs::path(p).replace_extension(".pgm");
    pat::write_pgm(preview, img, window);
    meta["kind"] = "image";
    meta["shape"] = t.shape;
    meta["dtype"] = pat::kDatasetDtype;
    meta["preview"] = {{"file", preview.filename().string()}, {"window", window_json(window)}};
    write_json(sidecar(p), meta);
}

void write_sensor_file(const fs::path& p, const pat::SensorData& y, json meta) {
    if (p.extension() != ".bin") throw UsageError("sensor data must be written to a .bin file");
    const pat::Tensor t = pat::sensor_tensor(y, "data", "raw");
    write_raw(p, t.data);
    meta["kind"] = "sensor_data";
    meta["shape"] = t.shape;
    meta["dtype"] = pat::kDatasetDtype;
    meta["dt"] = y.dt;
    write_json(sidecar(p), meta);
}

std::vector<std::uint64_t> sidecar_shape(const json& meta, const fs::path& p) {
    if (!meta.contains("shape")) throw pat::CorruptManifest(sidecar(p).string() + " has no shape");
    return meta.at("shape").get<std::vector<std::uint64_t>>();
}

struct NamedImage {
    std::string name;
    pat::Image image;
    json meta;
};

struct NamedData {
    std::string name;
    pat::SensorData data;
};

pat::DatasetMetadata dataset_metadata(const Geometry& g, double dt, std::uint64_t seed) {
    pat::DatasetMetadata m;
    m.mode = pat::DatasetMode::raw;
    m.n_sensors = g.sensors.size();
    m.dt = dt;
    m.dx = g.grid.dx();
    m.sound_speed = g.sim.medium.sound_speed;
    m.seed = seed;
    m.extra = {{"aperture", pat::to_string(g.sensors.aperture)},
               {"grid_height", g.grid.height()},
               {"grid_width", g.grid.width()}};
    return m;
}

void write_image_dataset(const fs::path& dir, const std::vector<NamedImage>& items,
                         pat::DatasetMetadata meta) {
    pat::DatasetContainer c;
    c.metadata = std::move(meta);
    fs::create_directories(dir / "preview");
    json windows = json::object();
    for (const auto& it : items) {
        c.tensors.push_back(pat::image_tensor(it.image, it.name, "image"));
        const auto w = pat::minmax_window(it.image);
        pat::write_pgm(dir / "preview" / (it.name + ".pgm"), it.image, w);
        windows[it.name] = window_json(w);
    }
    c.metadata.extra["preview"] = {{"dir", "preview"}, {"format", "pgm8"}, {"windows", windows}};
    pat::write_dataset(c, dir);
}

void write_data_dataset(const fs::path& dir, const std::vector<NamedData>& items,
                        pat::DatasetMetadata meta) {
    pat::DatasetContainer c;
    c.metadata = std::move(meta);
    for (const auto& it : items) c.tensors.push_back(pat::sensor_tensor(it.data, it.name, "raw"));
    pat::write_dataset(c, dir);
}

std::vector<NamedImage> read_images(const fs::path& p) {
    if (p.extension() == ".pgm") return {{p.stem().string(), pat::read_pgm(p), json::object()}};
    if (p.extension() == ".bin") {
        json meta = read_json(sidecar(p));
        const auto shape = sidecar_shape(meta, p);
        const auto count = std::accumulate(shape.begin(), shape.end(), std::uint64_t{1},
                                           std::multiplies<>());
        pat::Tensor t{"image", shape, "image", read_raw(p, count)};
        return {{p.stem().string(), pat::tensor_image(t), meta}};
    }
    if (fs::exists(p / pat::kManifestName)) {
        const auto c = pat::read_dataset(p);
        std::vector<NamedImage> out;
        for (const auto& t : c.tensors) {
            const bool image = t.shape.size() == 2 || (t.shape.size() == 3 && t.shape[0] == 1);
            if (!image || t.role == "raw" || t.role == "input") continue;
            json meta = c.metadata.extra;
            meta["n_sensors"] = c.metadata.n_sensors;
            out.push_back({t.name, pat::tensor_image(t), meta});
        }
        return out;
    }
    if (fs::is_directory(p)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(p)) {
            const auto ext = e.path().extension();
            if (e.is_regular_file() && (ext == ".bin" || (ext == ".pgm" &&
                                                          !fs::exists(fs::path(e.path()).replace_extension(".bin")))))
                files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        std::vector<NamedImage> out;
        for (const auto& f : files) {
            auto items = read_images(f);
            out.insert(out.end(), items.begin(), items.end());
        }
        return out;
    }
    throw pat::Error("no image input at " + p.string());
}

std::vector<NamedData> read_data(const fs::path& p) {
    if (p.extension() == ".bin") {
        const json meta = read_json(sidecar(p));
        const auto shape = sidecar_shape(meta, p);
        if (shape.size() != 2 || !meta.contains("dt"))
            throw pat::CorruptManifest(sidecar(p).string() + " does not describe sensor data");
        pat::Tensor t{"data", shape, "raw", read_raw(p, shape[0] * shape[1])};
        return {{p.stem().string(), pat::tensor_sensor_data(t, meta.at("dt").get<double>())}};
    }
    if (fs::exists(p / pat::kManifestName)) {
        const auto c = pat::read_dataset(p);
        std::vector<NamedData> out;
        for (const auto& t : c.tensors)
            if (t.shape.size() == 2 && t.role == "raw")
                out.push_back({t.name, pat::tensor_sensor_data(t, c.metadata.dt)});
        return out;
    }
    throw pat::Error("no sensor data at " + p.string());
}

void check_data_fits(const pat::SensorData& y, const pat::WaveSimulator& sim, const std::string& name) {
    if (y.n_sensors != sim.sensors().size() || y.n_steps != sim.n_steps())
        throw pat::DimensionMismatch(name + ": data is " + std::to_string(y.n_sensors) + "x" +
                                     std::to_string(y.n_steps) + " but the geometry expects " +
                                     std::to_string(sim.sensors().size()) + "x" +
                                     std::to_string(sim.n_steps()) +
                                     " (pass matching --sensors/--steps)");
    if (std::abs(y.dt - sim.dt()) > 1e-9 * sim.dt())
        throw pat::DimensionMismatch(name + ": sample interval differs from the geometry");
}

json geometry_json(const Geometry& g, const pat::WaveSimulator& sim, std::uint64_t seed) {
    return {{"n_sensors", g.sensors.size()},
            {"aperture", pat::to_string(g.sensors.aperture)},
            {"grid_height", g.grid.height()},
            {"grid_width", g.grid.width()},
            {"dx", g.grid.dx()},
            {"dt", sim.dt()},
            {"n_steps", sim.n_steps()},
            {"cfl", g.sim.cfl},
            {"sound_speed", g.sim.medium.sound_speed},
            {"seed", seed}};
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateArgs {
    Setup setup;
    std::size_t count = 10;
    fs::path out;
};

int run_generate(const GenerateArgs& a) {
    if (a.setup.height != a.setup.width) throw UsageError("generate needs a square grid");
    if (a.count == 0) throw UsageError("--count must be >= 1");
    pat::Grid grid(a.setup.height, a.setup.width, a.setup.dx);
    pat::AugmentConfig cfg;
    cfg.seed = a.setup.seed;
    cfg.crop_size = a.setup.height;
    const pat::Image source = pat::synth_vasculature(a.setup.seed);
    std::vector<NamedImage> items;
    for (std::size_t i = 0; i < a.count; ++i)
        items.push_back({item_name("phantom", i), pat::augment(source, cfg, i), json::object()});
    if (is_single_file(a.out)) {
        if (a.count != 1) throw UsageError("a single-file --out takes --count 1");
        write_image_file(a.out, items.front().image,
                         {{"kind", "phantom"}, {"seed", a.setup.seed}, {"dx", grid.dx()}});
        return 0;
    }
    pat::DatasetMetadata m;
    m.dx = grid.dx();
    m.seed = a.setup.seed;
    m.extra = {{"kind", "phantom"}, {"grid_height", grid.height()}, {"grid_width", grid.width()}};
    write_image_dataset(a.out, items, m);
    std::cerr << "wrote " << a.count << " phantoms to " << a.out.string() << '\n';
    return 0;
}

struct SimulateArgs {
    Setup setup;
    std::optional<fs::path> in;
    fs::path out;
    double noise = 0.0;
};

int run_simulate(const SimulateArgs& a) {
    const Geometry g = make_geometry(a.setup);
    if (a.noise < 0.0) throw UsageError("--noise must be >= 0");
    pat::WaveSimulator sim(g.grid, g.sensors, g.sim);
    std::vector<NamedImage> inputs;
    if (a.in) inputs = read_images(*a.in);
    else inputs.push_back({"phantom", synth_phantom(a.setup, 0), json::object()});
    if (inputs.empty()) throw pat::Error("no images found in " + a.in->string());

    std::vector<NamedData> outputs;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        auto y = sim.forward(inputs[k].image);
        if (a.noise > 0.0) {
            // Noise relative to the peak of each trace set.
            pat::Xoshiro256 rng(pat::derive_seed(a.setup.seed, k));
            const double sigma = a.noise * pat::max_abs(y.values);
            for (double& v : y.values) v += sigma * rng.normal();
        }
        outputs.push_back({inputs[k].name, std::move(y)});
    }
    json meta = geometry_json(g, sim, a.setup.seed);
    meta["noise"] = a.noise;
    if (is_single_file(a.out)) {
        if (outputs.size() != 1) throw UsageError("several inputs need a dataset directory --out");
        write_sensor_file(a.out, outputs.front().data, meta);
    } else {
        auto m = dataset_metadata(g, sim.dt(), a.setup.seed);
        m.extra["kind"] = "sensor_data";
        m.extra["noise"] = a.noise;
        m.extra["n_steps"] = sim.n_steps();
        write_data_dataset(a.out, outputs, m);
    }
    return 0;
}

struct ReconstructArgs {
    Setup setup;
    std::string method = "tr";
    std::optional<fs::path> in;
    fs::path out;
    std::optional<fs::path> truth_out;
    std::optional<double> lambda;
    int iters = 50;
    int inner = 20;
    int power_iters = 30;
    double tol = 1e-5;
    bool allow_negative = false;
};

int run_reconstruct(const ReconstructArgs& a) {
    const Geometry g = make_geometry(a.setup);
    pat::TvConfig tv;
    tv.lambda = a.lambda;
    tv.n_outer = a.iters;
    tv.n_inner = a.inner;
    tv.power_iters = a.power_iters;
    tv.tol = a.tol;
    tv.nonneg = !a.allow_negative;
    tv.seed = a.setup.seed;
    try {
        tv.validate();
    } catch (const pat::Error& e) {
        throw UsageError(e.what());
    }

    pat::WaveSimulator sim(g.grid, g.sensors, g.sim);
    std::vector<NamedData> inputs;
    std::optional<pat::Image> truth;
    if (a.in) {
        inputs = read_data(*a.in);
        if (inputs.empty()) throw pat::Error("no sensor data found in " + a.in->string());
    } else {
        truth = synth_phantom(a.setup, 0);
        inputs.push_back({"recon", sim.forward(*truth)});
        if (a.truth_out) write_image_file(*a.truth_out, *truth, {{"kind", "phantom"}, {"seed", a.setup.seed}});
    }

    if (a.method == "tv" && !tv.lipschitz)
        tv.lipschitz = pat::lipschitz_estimate(pat::make_linear_model(sim), tv.power_iters, tv.seed);

    std::vector<NamedImage> outputs;
    for (const auto& item : inputs) {
        check_data_fits(item.data, sim, item.name);
        json meta = geometry_json(g, sim, a.setup.seed);
        meta["method"] = a.method;
        pat::Image x;
        if (a.method == "tr") {
            x = sim.time_reversal(item.data);
        } else {
            const auto r = pat::fista_tv(item.data, sim, tv);
            x = r.x;
            meta["lambda"] = r.lambda;
            meta["lipschitz"] = r.lipschitz;
            meta["iterations"] = r.iterations;
            meta["restarts"] = r.restarts;
            meta["status"] = pat::to_string(r.status);
            meta["relative_residual"] = r.relative_residual.back();
            if (r.status != pat::FistaStatus::converged)
                std::cerr << item.name << ": " << pat::to_string(r.status) << " after "
                          << r.iterations << " iterations\n";
        }
        if (truth) {
            const auto q = pat::evaluate_quality(pat::clip_and_scale(x), *truth);
            meta["psnr_db"] = std::isinf(q.psnr_db) ? json("inf") : json(q.psnr_db);
            meta["ssim"] = q.ssim;
        }
        outputs.push_back({item.name, std::move(x), meta});
    }

    if (is_single_file(a.out)) {
        if (outputs.size() != 1) throw UsageError("several inputs need a dataset directory --out");
        write_image_file(a.out, outputs.front().image, outputs.front().meta);
    } else {
        auto m = dataset_metadata(g, sim.dt(), a.setup.seed);
        m.extra["kind"] = "reconstruction";
        m.extra["method"] = a.method;
        write_image_dataset(a.out, outputs, m);
    }
    return 0;
}

struct InterpolateArgs {
    Setup setup;
    std::string mode = "pixel";
    std::optional<fs::path> in;
    fs::path out;
    bool spreading = false;
};

int run_interpolate(const InterpolateArgs& a) {
    const Geometry g = make_geometry(a.setup);
    pat::WaveSimulator sim(g.grid, g.sensors, g.sim);
    std::vector<NamedData> inputs;
    if (a.in) inputs = read_data(*a.in);
    else inputs.push_back({"input", sim.forward(synth_phantom(a.setup, 0))});
    if (inputs.empty()) throw pat::Error("no sensor data found");

    pat::DatasetContainer c;
    c.metadata = dataset_metadata(g, sim.dt(), a.setup.seed);
    c.metadata.mode = pat::parse_dataset_mode(a.mode);
    c.metadata.extra["kind"] = "network_input";
    c.metadata.extra["spreading_compensation"] = a.spreading;
    for (const auto& item : inputs) {
        if (item.data.n_sensors != g.sensors.size())
            throw pat::DimensionMismatch(item.name + ": sensor count does not match --sensors");
        if (a.mode == "pixel") {
            pat::PixelInterpOptions opts;
            opts.spreading_compensation = a.spreading;
            c.tensors.push_back(pat::interp_tensor(
                pat::pixel_interpolate(item.data, g.sensors, g.grid, g.sim.medium, opts), item.name,
                "raw"));
        } else {
            c.tensors.push_back(pat::channel_tensor(
                pat::resize_sensor_data(item.data, std::size_t(g.grid.height()),
                                        std::size_t(g.grid.width())),
                item.name, "raw"));
        }
    }
    if (is_single_file(a.out)) {
        if (c.tensors.size() != 1) throw UsageError("several inputs need a dataset directory --out");
        if (a.out.extension() != ".bin") throw UsageError("interpolation output must be .bin");
        write_raw(a.out, c.tensors.front().data);
        json meta = geometry_json(g, sim, a.setup.seed);
        meta["kind"] = a.mode == "pixel" ? "pixel_interp" : "resized_sensor_data";
        meta["shape"] = c.tensors.front().shape;
        meta["dtype"] = pat::kDatasetDtype;
        write_json(sidecar(a.out), meta);
    } else {
        pat::write_dataset(c, a.out);
    }
    return 0;
}

struct ExportArgs {
    Setup setup;
    std::string mode = "pixel";
    std::size_t count = 100;
    std::string split = "train";
    std::optional<fs::path> source;
    fs::path out;
};

int run_export(const ExportArgs& a) {
    const Geometry g = make_geometry(a.setup);
    if (g.grid.height() != g.grid.width()) throw UsageError("export needs a square grid");
    if (a.count == 0) throw UsageError("--count must be >= 1");
    pat::ExportOptions opts;
    opts.mode = pat::parse_dataset_mode(a.mode);
    opts.n_items = a.count;
    opts.master_seed = a.setup.seed;
    opts.split = pat::parse_split(a.split);
    const pat::Image source =
        a.source ? read_images(*a.source).at(0).image : pat::synth_vasculature(a.setup.seed);
    const auto c = pat::export_training_pairs(source, g.grid, g.sensors, g.sim, opts);
    pat::write_dataset(c, a.out);
    std::cerr << "wrote " << a.count << " " << a.mode << " pairs to " << a.out.string() << '\n';
    return 0;
}

struct EvaluateArgs {
    fs::path recon;
    fs::path gt;
    std::optional<fs::path> out;
    std::optional<std::string> method;
    std::optional<int> n_sensors;
    bool scale = false;
    double peak = 1.0;
};

std::string format_metric(double v, int digits) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// Mean and sample standard deviation; a column of +inf reports inf with zero spread.
std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (std::all_of(v.begin(), v.end(), [](double x) { return std::isinf(x) && x > 0; }))
        return {std::numeric_limits<double>::infinity(), 0.0};
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / double(v.size() - 1))};
}

int run_evaluate(const EvaluateArgs& a) {
    if (!(a.peak > 0.0)) throw UsageError("--peak must be > 0");
    const auto recon = read_images(a.recon);
    const auto gt = read_images(a.gt);
    if (recon.empty()) throw pat::Error("no reconstructions found in " + a.recon.string());
    std::map<std::string, const pat::Image*> truth;
    for (const auto& g : gt) truth[g.name] = &g.image;
    // A lone image on each side pairs up regardless of name.
    const bool single = recon.size() == 1 && gt.size() == 1;

    std::ostringstream csv;
    csv << "id,method,n_sensors,psnr_db,ssim\n";
    std::vector<double> ps, ss;
    std::string method_label = "unknown";
    long sensors_label = 0;
    for (const auto& r : recon) {
        const pat::Image* ref = single ? &gt.front().image : nullptr;
        if (!ref) {
            const auto it = truth.find(r.name);
            if (it == truth.end()) throw pat::Error("no ground truth named " + r.name);
            ref = it->second;
        }
        const std::string method =
            a.method ? *a.method : r.meta.value("method", std::string("unknown"));
        const long n_sensors = a.n_sensors ? *a.n_sensors : r.meta.value("n_sensors", 0L);
        method_label = method;
        sensors_label = n_sensors;
        const pat::Image img = a.scale ? pat::clip_and_scale(r.image) : r.image;
        const auto q = pat::evaluate_quality(img, *ref, a.peak);
        ps.push_back(q.psnr_db);
        ss.push_back(q.ssim);
        csv << r.name << ',' << method << ',' << n_sensors << ',' << format_metric(q.psnr_db, 4)
            << ',' << format_metric(q.ssim, 6) << '\n';
    }
    const auto [pm, psd] = mean_std(ps);
    const auto [sm, ssd] = mean_std(ss);
    csv << "mean±std," << method_label << ',' << sensors_label << ',' << format_metric(pm, 4)
        << "±" << format_metric(psd, 4) << ',' << format_metric(sm, 6) << "±"
        << format_metric(ssd, 6) << '\n';

    if (a.out) {
        std::ofstream f(*a.out, std::ios::trunc);
        f << csv.str();
        if (!f) throw pat::Error("failed to write " + a.out->string());
    } else {
        std::cout << csv.str();
    }
    return 0;
}

struct BenchArgs {
    Setup setup;
    int repeats = 3;
    int iters = 50;
    int power_iters = 30;
    std::optional<fs::path> out;
};

template <class F>
double seconds_per_call(int repeats, F&& f) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    for (int r = 0; r < repeats; ++r) f();
    return std::chrono::duration<double>(clock::now() - start).count() / repeats;
}

int run_bench(const BenchArgs& a) {
    if (a.repeats < 1 || a.iters < 1 || a.power_iters < 1)
        throw UsageError("--repeats, --iters and --power-iters must be >= 1");
    const Geometry g = make_geometry(a.setup);
    pat::WaveSimulator sim(g.grid, g.sensors, g.sim);
    const pat::Image x = synth_phantom(a.setup, 0);
    const auto y = sim.forward(x);

    std::ostringstream csv;
    csv << "stage,n_sensors,height,width,repeats,seconds_per_image\n";
    auto row = [&](const char* stage, int reps, double sec) {
        csv << stage << ',' << g.sensors.size() << ',' << g.grid.height() << ',' << g.grid.width()
            << ',' << reps << ',' << format_metric(sec, 9) << '\n';
    };

    // The cheap stage gets more repeats so its timer resolution is adequate.
    const int interp_reps = std::max(a.repeats, 20);
    row("pixel_interpolate", interp_reps, seconds_per_call(interp_reps, [&] {
            (void)pat::pixel_interpolate(y, g.sensors, g.grid, g.sim.medium);
        }));
    row("time_reversal", a.repeats, seconds_per_call(a.repeats, [&] { (void)sim.time_reversal(y); }));

    double lipschitz = 0.0;
    row("lipschitz_estimate", 1, seconds_per_call(1, [&] {
            lipschitz = pat::lipschitz_estimate(pat::make_linear_model(sim), a.power_iters, a.setup.seed);
        }));
    pat::TvConfig tv;
    tv.n_outer = a.iters;
    tv.tol = 0.0;
    tv.lipschitz = lipschitz;
    row("fista_tv", 1, seconds_per_call(1, [&] { (void)pat::fista_tv(y, sim, tv); }));

    if (a.out) {
        std::ofstream f(*a.out, std::ios::trunc);
        f << csv.str();
        if (!f) throw pat::Error("failed to write " + a.out->string());
    } else {
        std::cout << csv.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photoacoustic tomography toolkit: phantoms, simulation, reconstruction, "
                 "pixel-wise interpolation, datasets and metrics."};
    app.footer(
        "Environment:\n"
        "  PAT_DX   default grid spacing in metres for --dx (1e-4)\n"
        "  PAT_CFL  default Courant number for --cfl (0.3)\n"
        "\n"
        "Paths ending in .bin or .pgm are single arrays (.bin carries a .json sidecar and a\n"
        ".pgm preview); any other --out is a dataset directory with manifest.json.\n"
        "Exit status: 0 success, 2 usage error, 1 runtime error.");
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "Write synthetic vessel phantoms");
    add_setup_options(*c_gen, gen.setup, false);
    c_gen->add_option("--count", gen.count, "Number of phantoms")->capture_default_str();
    c_gen->add_option("--out", gen.out, "Output directory or .bin/.pgm file")->required();

    SimulateArgs simu;
    auto* c_sim = app.add_subcommand("simulate", "Forward model: images to sensor data");
    add_setup_options(*c_sim, simu.setup);
    c_sim->add_option("--in", simu.in, "Image file or directory (default: phantom from --seed)");
    c_sim->add_option("--out", simu.out, "Output .bin file or dataset directory")->required();
    c_sim->add_option("--noise", simu.noise, "Gaussian noise, relative to peak signal")
        ->capture_default_str();

    ReconstructArgs rec;
    auto* c_rec = app.add_subcommand("reconstruct", "Time reversal or TV-regularized FISTA");
    add_setup_options(*c_rec, rec.setup);
    c_rec->add_option("--method", rec.method, "tr or tv")
        ->check(CLI::IsMember({"tr", "tv"}))
        ->capture_default_str();
    c_rec->add_option("--in", rec.in, "Sensor data .bin or dataset (default: simulate a phantom)");
    c_rec->add_option("--out", rec.out, "Output .bin/.pgm file or dataset directory")->required();
    c_rec->add_option("--truth-out", rec.truth_out, "Also write the synthesized phantom here");
    c_rec->add_option("--lambda", rec.lambda, "TV weight (default 1e-3 * max|A^T y|)");
    c_rec->add_option("--iters", rec.iters, "FISTA outer iterations")->capture_default_str();
    c_rec->add_option("--inner", rec.inner, "TV prox inner iterations")->capture_default_str();
    c_rec->add_option("--power-iters", rec.power_iters, "Power iterations for the step size")
        ->capture_default_str();
    c_rec->add_option("--tol", rec.tol, "Relative change for convergence")->capture_default_str();
    c_rec->add_flag("--allow-negative", rec.allow_negative, "Drop the x >= 0 constraint");

    InterpolateArgs interp;
    auto* c_int = app.add_subcommand("interpolate", "Map sensor data onto the image grid");
    add_setup_options(*c_int, interp.setup);
    c_int->add_option("--mode", interp.mode, "pixel or mdirect")
        ->check(CLI::IsMember({"pixel", "mdirect"}))
        ->capture_default_str();
    c_int->add_option("--in", interp.in, "Sensor data .bin or dataset (default: simulate a phantom)");
    c_int->add_option("--out", interp.out, "Output .bin file or dataset directory")->required();
    c_int->add_flag("--spreading", interp.spreading, "Multiply by sqrt(distance)");

    ExportArgs exp;
    auto* c_exp = app.add_subcommand("export", "Write paired training data");
    add_setup_options(*c_exp, exp.setup);
    c_exp->add_option("--mode", exp.mode, "post, pixel or mdirect")
        ->check(CLI::IsMember({"post", "pixel", "mdirect"}))
        ->capture_default_str();
    c_exp->add_option("--count", exp.count, "Number of pairs")->capture_default_str();
    c_exp->add_option("--split", exp.split, "train or test")
        ->check(CLI::IsMember({"train", "test"}))
        ->capture_default_str();
    c_exp->add_option("--source", exp.source, "Source image (default: 340 px phantom from --seed)");
    c_exp->add_option("--out", exp.out, "Dataset directory")->required();

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "PSNR/SSIM table against ground truth");
    c_ev->add_option("--recon", ev.recon, "Reconstructions (file, directory or dataset)")->required();
    c_ev->add_option("--gt", ev.gt, "Ground truth (file, directory or dataset)")->required();
    c_ev->add_option("--out", ev.out, "CSV path (default: stdout)");
    c_ev->add_option("--method", ev.method, "Method label for the table");
    c_ev->add_option("--n-sensors", ev.n_sensors, "Sensor count label for the table");
    c_ev->add_flag("--scale", ev.scale, "Clip negatives and divide by the maximum first");
    c_ev->add_option("--peak", ev.peak, "PSNR peak value")->capture_default_str();

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "Per-stage wall-clock timings (CSV)");
    bench.setup.sensors = 64;
    add_setup_options(*c_bench, bench.setup);
    c_bench->add_option("--repeats", bench.repeats, "Repeats for time reversal")->capture_default_str();
    c_bench->add_option("--iters", bench.iters, "FISTA iterations")->capture_default_str();
    c_bench->add_option("--power-iters", bench.power_iters, "Power iterations")->capture_default_str();
    c_bench->add_option("--out", bench.out, "CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* failing = &app;
        for (auto* sub : app.get_subcommands()) failing = sub;
        std::cerr << failing->help();
        return kExitUsage;
    }

    try {
        if (c_gen->parsed()) return run_generate(gen);
        if (c_sim->parsed()) return run_simulate(simu);
        if (c_rec->parsed()) return run_reconstruct(rec);
        if (c_int->parsed()) return run_interpolate(interp);
        if (c_exp->parsed()) return run_export(exp);
        if (c_ev->parsed()) return run_evaluate(ev);
        if (c_bench->parsed()) return run_bench(bench);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
