#include "pat/datastore.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pat/error.hpp"

namespace pat {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(DatasetMode m) noexcept {
    switch (m) {
    case DatasetMode::post: return "post";
    case DatasetMode::pixel: return "pixel";
    case DatasetMode::mdirect: return "mdirect";
    case DatasetMode::raw: return "raw";
    }
    return "raw";
}

std::string_view to_string(Split s) noexcept { return s == Split::train ? "train" : "test"; }

DatasetMode parse_dataset_mode(std::string_view s) {
    if (s == "post") return DatasetMode::post;
    if (s == "pixel") return DatasetMode::pixel;
    if (s == "mdirect") return DatasetMode::mdirect;
    if (s == "raw") return DatasetMode::raw;
    throw InvalidArgument("unknown dataset mode '" + std::string(s) + "'");
}

Split parse_split(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw InvalidArgument("unknown split '" + std::string(s) + "'");
}

std::uint64_t Tensor::element_count() const noexcept {
    std::uint64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

const Tensor* DatasetContainer::find(std::string_view name) const noexcept {
    for (const Tensor& t : tensors)
        if (t.name == name) return &t;
    return nullptr;
}

std::vector<const Tensor*> DatasetContainer::with_role(std::string_view role) const {
    std::vector<const Tensor*> out;
    for (const Tensor& t : tensors)
        if (t.role == role) out.push_back(&t);
    return out;
}

namespace {

bool valid_name(std::string_view name) {
    if (name.empty() || name.front() == '.') return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '_' || c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

std::string tensor_file(const Tensor& t) { return t.name + ".bin"; }

json metadata_to_json(const DatasetMetadata& m) {
    return json{{"mode", to_string(m.mode)},
                {"n_sensors", m.n_sensors},
                {"dt", m.dt},
                {"dx", m.dx},
                {"sound_speed", m.sound_speed},
                {"seed", m.seed},
                {"split", to_string(m.split)},
                {"extra", m.extra}};
}

DatasetMetadata metadata_from_json(const json& j) {
    DatasetMetadata m;
    m.mode = parse_dataset_mode(j.at("mode").get<std::string>());
    m.n_sensors = j.at("n_sensors").get<std::uint64_t>();
    m.dt = j.at("dt").get<double>();
    m.dx = j.at("dx").get<double>();
    m.sound_speed = j.at("sound_speed").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.split = parse_split(j.at("split").get<std::string>());
    if (j.contains("extra")) m.extra = j.at("extra");
    return m;
}

} // namespace

void DatasetContainer::validate() const {
    for (std::size_t a = 0; a < tensors.size(); ++a) {
        const Tensor& t = tensors[a];
        if (!valid_name(t.name)) throw CorruptManifest("invalid tensor name '" + t.name + "'");
        if (t.shape.empty()) throw ShapeMismatch("tensor '" + t.name + "' has an empty shape");
        if (t.element_count() != t.data.size()) {
            throw ShapeMismatch("tensor '" + t.name + "' declares " +
                                std::to_string(t.element_count()) + " elements but holds " +
                                std::to_string(t.data.size()));
        }
        for (std::size_t b = 0; b < a; ++b)
            if (tensors[b].name == t.name)
                throw CorruptManifest("duplicate tensor name '" + t.name + "'");
    }
    if (metadata.mode != DatasetMode::raw) {
        const auto n_in = with_role("input").size();
        const auto n_tgt = with_role("target").size();
        if (n_in != n_tgt) {
            throw ShapeMismatch("paired dataset has " + std::to_string(n_in) + " inputs and " +
                                std::to_string(n_tgt) + " targets");
        }
    }
}

std::vector<std::uint8_t> encode_f32le(std::span<const float> values) {
    std::vector<std::uint8_t> out(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(values[i]);
        out[4 * i + 0] = static_cast<std::uint8_t>(bits & 0xFFu);
        out[4 * i + 1] = static_cast<std::uint8_t>((bits >> 8) & 0xFFu);
        out[4 * i + 2] = static_cast<std::uint8_t>((bits >> 16) & 0xFFu);
        out[4 * i + 3] = static_cast<std::uint8_t>((bits >> 24) & 0xFFu);
    }
    return out;
}

std::vector<float> decode_f32le(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 4 != 0) throw ShapeMismatch("f32le payload length is not a multiple of 4");
    std::vector<float> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(bytes[4 * i]) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                                   (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
        out[i] = std::bit_cast<float>(bits);
    }
    return out;
}

void write_dataset(const DatasetContainer& container, const fs::path& dir) {
    container.validate();
    fs::create_directories(dir);

    json tensors = json::array();
    for (const Tensor& t : container.tensors) {
        const auto bytes = encode_f32le(t.data);
        std::ofstream f(dir / tensor_file(t), std::ios::binary | std::ios::trunc);
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw Error("failed to write tensor file for '" + t.name + "'");
        tensors.push_back(
            json{{"name", t.name}, {"shape", t.shape}, {"file", tensor_file(t)}, {"role", t.role}});
    }
    const json manifest{{"version", kDatasetVersion},
                        {"dtype", kDatasetDtype},
                        {"metadata", metadata_to_json(container.metadata)},
                        {"tensors", tensors}};

    const fs::path tmp = dir / (std::string(kManifestName) + ".tmp");
    {
        std::ofstream f(tmp, std::ios::trunc);
        f << manifest.dump(2) << '\n';
        if (!f) throw Error("failed to write manifest in " + dir.string());
    }
    fs::rename(tmp, dir / kManifestName);
}

DatasetContainer read_dataset(const fs::path& dir) {
    const fs::path mpath = dir / kManifestName;
    std::ifstream f(mpath);
    if (!f) throw CorruptManifest("cannot open " + mpath.string());

    json manifest;
    try {
        manifest = json::parse(f);
    } catch (const json::exception& e) {
        throw CorruptManifest("manifest is not valid JSON: " + std::string(e.what()));
    }

    DatasetContainer out;
    try {
        if (!manifest.is_object() || !manifest.contains("version"))
            throw CorruptManifest("manifest has no version field");
        const int version = manifest.at("version").get<int>();
        if (version != kDatasetVersion)
            throw UnsupportedVersion("dataset version " + std::to_string(version) +
                                     " is not supported (expected " +
                                     std::to_string(kDatasetVersion) + ")");
        if (manifest.at("dtype").get<std::string>() != kDatasetDtype)
            throw UnsupportedVersion("unsupported dtype " + manifest.at("dtype").dump());
        out.metadata = metadata_from_json(manifest.at("metadata"));

        for (const json& jt : manifest.at("tensors")) {
            Tensor t;
            t.name = jt.at("name").get<std::string>();
            t.shape = jt.at("shape").get<std::vector<std::uint64_t>>();
            t.role = jt.at("role").get<std::string>();
            const auto file = jt.at("file").get<std::string>();
            if (!valid_name(t.name) || file != tensor_file(t))
                throw CorruptManifest("tensor record '" + t.name + "' has an invalid file entry");

            const fs::path tpath = dir / file;
            std::error_code ec;
            const auto size = fs::file_size(tpath, ec);
            if (ec) throw CorruptManifest("missing tensor file " + tpath.string());
            if (size != t.element_count() * 4) {
                throw ShapeMismatch("tensor '" + t.name + "' declares " +
                                    std::to_string(t.element_count() * 4) + " bytes but " +
                                    file + " holds " + std::to_string(size));
            }
            std::vector<std::uint8_t> bytes(size);
            std::ifstream tf(tpath, std::ios::binary);
            tf.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
            if (!tf) throw CorruptManifest("failed to read " + tpath.string());
            t.data = decode_f32le(bytes);
            out.tensors.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw CorruptManifest("manifest is malformed: " + std::string(e.what()));
    } catch (const InvalidArgument& e) {
        throw CorruptManifest(std::string("manifest is malformed: ") + e.what());
    }
    out.validate();
    return out;
}

std::string input_name(std::size_t index) {
    std::ostringstream s;
    s << "input_" << std::setw(6) << std::setfill('0') << index;
    return s.str();
}

std::string target_name(std::size_t index) {
    std::ostringstream s;
    s << "target_" << std::setw(6) << std::setfill('0') << index;
    return s.str();
}

} // namespace pat
