#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pat {

inline constexpr int kDatasetVersion = 1;
inline constexpr std::string_view kDatasetDtype = "f32le";
inline constexpr std::string_view kManifestName = "manifest.json";

enum class DatasetMode { post, pixel, mdirect, raw };
enum class Split { train, test };

std::string_view to_string(DatasetMode m) noexcept;
std::string_view to_string(Split s) noexcept;
DatasetMode parse_dataset_mode(std::string_view s);
Split parse_split(std::string_view s);

struct DatasetMetadata {
    DatasetMode mode = DatasetMode::raw;
    std::uint64_t n_sensors = 0;
    double dt = 0.0;
    double dx = 0.0;
    double sound_speed = 0.0;
    std::uint64_t seed = 0;
    Split split = Split::train;
    // Free-form extras (aperture, grid size, preview windowing, ...).
    nlohmann::json extra = nlohmann::json::object();

    friend bool operator==(const DatasetMetadata&, const DatasetMetadata&) = default;
};

/// Named float32 array, row-major (channel-major for 3D).
struct Tensor {
    std::string name;
    std::vector<std::uint64_t> shape;
    std::string role;
    std::vector<float> data;

    std::uint64_t element_count() const noexcept;
    friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// A directory holding manifest.json plus one little-endian float32 `.bin`
/// file per tensor.
struct DatasetContainer {
    DatasetMetadata metadata;
    std::vector<Tensor> tensors;

    const Tensor* find(std::string_view name) const noexcept;
    std::vector<const Tensor*> with_role(std::string_view role) const;
    /// Checks names, shapes and input/target pairing; throws ShapeMismatch
    /// or CorruptManifest.
    void validate() const;

    friend bool operator==(const DatasetContainer&, const DatasetContainer&) = default;
};

std::vector<std::uint8_t> encode_f32le(std::span<const float> values);
std::vector<float> decode_f32le(std::span<const std::uint8_t> bytes);

/// Writes every tensor file, then the manifest (atomically via rename).
void write_dataset(const DatasetContainer& container, const std::filesystem::path& dir);

/// Throws CorruptManifest, ShapeMismatch or UnsupportedVersion.
DatasetContainer read_dataset(const std::filesystem::path& dir);

/// Conventional tensor names for item `index` of a paired dataset.
std::string input_name(std::size_t index);
std::string target_name(std::size_t index);

} // namespace pat
