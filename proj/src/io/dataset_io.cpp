#include "dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "raw.hpp"

namespace fpnet::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json array_entry(const std::string& file, std::vector<std::size_t> shape) {
  return {{"file", file}, {"shape", shape}, {"dtype", "float32"}};
}

json write_grid(const fs::path& dir, const std::string& file, const RealGrid& g) {
  write_f32(dir / file, g.values());
  return array_entry(file, {g.side(), g.side()});
}

std::string indexed(const std::string& stem, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return stem + "/" + buf + ".f32";
}

std::size_t element_count(const json& shape) {
  std::size_t n = 1;
  for (const auto& d : shape) n *= d.get<std::size_t>();
  return n;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    fail(ErrorCode::Io, "manifest: missing '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

std::vector<double> read_entry(const fs::path& dir, const json& entry,
                               const std::vector<std::size_t>& expected) {
  const auto file = field(entry, "file", "array entry").get<std::string>();
  if (field(entry, "dtype", file).get<std::string>() != "float32")
    fail(ErrorCode::Io, "manifest: '" + file + "' must be float32");
  const auto shape = field(entry, "shape", file).get<std::vector<std::size_t>>();
  if (!expected.empty() && shape != expected)
    fail(ErrorCode::Io, "manifest: '" + file + "' has an unexpected shape");
  if (!fs::exists(dir / file)) fail(ErrorCode::Io, "manifest references missing file '" + file + "'");
  return read_f32(dir / file, element_count(shape));
}

RealGrid read_grid(const fs::path& dir, const json& entry) {
  const auto shape = field(entry, "shape", "array entry").get<std::vector<std::size_t>>();
  if (shape.size() != 2 || shape[0] != shape[1])
    fail(ErrorCode::Io, "manifest: expected a square 2-D array");
  return RealGrid(shape[0], read_entry(dir, entry, shape));
}

}  // namespace

json optics_to_json(const OpticsConfig& cfg) {
  return {{"lambda_um", cfg.lambda_um},
          {"na", cfg.na},
          {"n_high", cfg.n_high},
          {"stride", cfg.stride},
          {"px_high", cfg.px_high}};
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Io, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

json write_complex(const fs::path& dir, const std::string& name, const ComplexGrid& z) {
  std::vector<double> planes(2 * z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    planes[i] = z[i].real();
    planes[z.size() + i] = z[i].imag();
  }
  write_f32(dir / name, planes);
  json entry = array_entry(name, {2, z.side(), z.side()});
  entry["complex"] = "planes(real,imag)";
  return entry;
}

ComplexGrid read_complex(const fs::path& dir, const json& entry) {
  const auto shape = field(entry, "shape", "complex entry").get<std::vector<std::size_t>>();
  if (shape.size() != 3 || shape[0] != 2 || shape[1] != shape[2])
    fail(ErrorCode::Io, "manifest: complex arrays must have shape [2, n, n]");
  const auto planes = read_entry(dir, entry, shape);
  const std::size_t count = shape[1] * shape[2];
  ComplexGrid z(shape[1]);
  for (std::size_t i = 0; i < count; ++i) z[i] = {planes[i], planes[count + i]};
  return z;
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  dataset.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());

  json arrays = json::object();
  if (!dataset.measurements.empty()) {
    fs::create_directories(dir / "measurements");
    json list = json::array();
    for (std::size_t i = 0; i < dataset.measurements.size(); ++i) {
      json entry = write_grid(dir, indexed("measurements", i), dataset.measurements[i].data);
      entry["px_um"] = dataset.measurements[i].px;
      list.push_back(entry);
    }
    arrays["measurements"] = list;
  }
  if (!dataset.scalars.empty()) {
    write_f32(dir / "scalars.f32", dataset.scalars);
    arrays["scalars"] = array_entry("scalars.f32", {dataset.scalars.size()});
  }
  if (!dataset.patterns.empty()) {
    fs::create_directories(dir / "patterns");
    json list = json::array();
    for (std::size_t i = 0; i < dataset.patterns.size(); ++i)
      list.push_back(write_grid(dir, indexed("patterns", i), dataset.patterns[i]));
    arrays["patterns"] = list;
  }
  if (dataset.psf_inc.size() > 0) arrays["psf_inc"] = write_grid(dir, "psf_inc.f32", dataset.psf_inc);
  if (dataset.ground_truth)
    arrays["ground_truth"] = write_complex(dir, "ground_truth.f32", dataset.ground_truth->complex());

  json wavevectors = json::array();
  for (const auto& k : dataset.cfg.wavevectors) wavevectors.push_back({k.kx, k.ky});
  const json manifest = {{"format", kDatasetFormat},
                         {"version", kDatasetVersion},
                         {"kind", to_string(dataset.kind)},
                         {"mode", to_string(dataset.mode)},
                         {"optics", optics_to_json(dataset.cfg)},
                         {"wavevectors", wavevectors},
                         {"arrays", arrays},
                         {"provenance", dataset.provenance}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Dataset load_dataset(const fs::path& dir) {
  const json m = read_json_file(dir / "manifest.json");
  try {
    if (field(m, "format", "manifest").get<std::string>() != kDatasetFormat)
      fail(ErrorCode::Io, "'" + dir.string() + "' is not an fpnet dataset");
    const auto version = field(m, "version", "manifest").get<std::string>();
    if (version.substr(0, 2) != "1.")
      fail(ErrorCode::Io, "unsupported dataset version '" + version + "'");

    Dataset ds;
    ds.kind = parse_dataset_kind(field(m, "kind", "manifest").get<std::string>());
    ds.mode = parse_formation_mode(field(m, "mode", "manifest").get<std::string>());
    const json& optics = field(m, "optics", "manifest");
    ds.cfg.lambda_um = field(optics, "lambda_um", "optics").get<double>();
    ds.cfg.na = field(optics, "na", "optics").get<double>();
    ds.cfg.n_high = field(optics, "n_high", "optics").get<std::size_t>();
    ds.cfg.stride = field(optics, "stride", "optics").get<std::size_t>();
    ds.cfg.px_high = field(optics, "px_high", "optics").get<double>();
    ds.cfg.wavevectors.clear();
    for (const auto& k : field(m, "wavevectors", "manifest"))
      ds.cfg.wavevectors.push_back({k.at(0).get<double>(), k.at(1).get<double>()});

    const json& arrays = field(m, "arrays", "manifest");
    if (arrays.contains("measurements"))
      for (const auto& entry : arrays["measurements"])
        ds.measurements.push_back({read_grid(dir, entry), entry.value("px_um", 1.0)});
    if (arrays.contains("scalars")) ds.scalars = read_entry(dir, arrays["scalars"], {});
    if (arrays.contains("patterns"))
      for (const auto& entry : arrays["patterns"]) ds.patterns.push_back(read_grid(dir, entry));
    if (arrays.contains("psf_inc")) ds.psf_inc = read_grid(dir, arrays["psf_inc"]);
    if (arrays.contains("ground_truth"))
      ds.ground_truth = FpObject::from_complex(read_complex(dir, arrays["ground_truth"]));
    ds.provenance = m.value("provenance", json::object());
    ds.validate();
    return ds;
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, "malformed manifest in '" + dir.string() + "': " + e.what());
  }
}

}  // namespace fpnet::io
