#pragma once

#include <filesystem>

#include <json.hpp>

#include "core/simdata.hpp"

namespace fpnet::io {

inline constexpr const char* kDatasetFormat = "fpnet-dataset";
inline constexpr const char* kDatasetVersion = "1.0";

// Writes manifest.json plus one raw float32 file per array under `dir`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
// Reads and validates a dataset written by save_dataset.
Dataset load_dataset(const std::filesystem::path& dir);

nlohmann::json optics_to_json(const OpticsConfig& cfg);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Complex image as a [2, side, side] raw file (real plane, imaginary plane).
nlohmann::json write_complex(const std::filesystem::path& dir, const std::string& name,
                             const ComplexGrid& z);
ComplexGrid read_complex(const std::filesystem::path& dir, const nlohmann::json& entry);

}  // namespace fpnet::io
