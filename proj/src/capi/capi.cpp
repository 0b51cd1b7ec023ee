#include "fpnet/fpnet.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "core/gradcheck.hpp"
#include "io/config.hpp"
#include "io/dataset_io.hpp"
#include "io/png.hpp"
#include "io/results.hpp"
#include "io/scenario.hpp"

#ifndef FPNET_VERSION
#define FPNET_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

struct fpnet_dataset {
  fpnet::Dataset data;
};

struct fpnet_result {
  fpnet::ReconResult result;
  fpnet::ReconConfig config;
  json dataset_info;
};

namespace {

thread_local std::string g_last_error;

fpnet_status status_of(fpnet::ErrorCode code) {
  switch (code) {
    case fpnet::ErrorCode::Dimension: return FPNET_ERR_DIMENSION;
    case fpnet::ErrorCode::OutOfBand: return FPNET_ERR_OUT_OF_BAND;
    case fpnet::ErrorCode::Domain: return FPNET_ERR_DOMAIN;
    case fpnet::ErrorCode::Config: return FPNET_ERR_CONFIG;
    case fpnet::ErrorCode::Io: return FPNET_ERR_IO;
    case fpnet::ErrorCode::NonFinite: return FPNET_ERR_NON_FINITE;
    case fpnet::ErrorCode::InvalidArgument: return FPNET_ERR_INVALID_ARGUMENT;
  }
  return FPNET_ERR_INTERNAL;
}

// Runs `body`, mapping exceptions onto status codes and the thread-local message.
template <class F>
fpnet_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return FPNET_OK;
  } catch (const fpnet::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return FPNET_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FPNET_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FPNET_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fpnet::fail(fpnet::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void apply(const fpnet_options* o, fpnet::ReconConfig& cfg) {
  if (!o) return;
  if (o->has_seed) cfg.seed = o->seed;
  if (o->deterministic >= 0) cfg.deterministic = o->deterministic != 0;
  if (o->threads) cfg.threads = o->threads;
}

fpnet::io::LocatedJson located(const char* config, const char* source, bool is_path) {
  need(config, "config");
  if (is_path) return fpnet::io::load_located(config);
  return fpnet::io::parse_located(config, source ? source : "<config>");
}

void simulate(const char* config, const char* source, bool is_path, const fpnet_options* options,
              fpnet_dataset** out) {
  need(out, "out");
  *out = nullptr;
  auto cfg = fpnet::io::simulate_config_from(located(config, source, is_path));
  if (options && options->has_seed) {
    cfg.seed = options->seed;
    cfg.noise.seed = options->seed;
  }
  auto ds = std::make_unique<fpnet_dataset>();
  ds->data = fpnet::io::build_dataset(cfg);
  // Memory holds exactly what the files will hold.
  fpnet::quantize_to_float32(ds->data);
  *out = ds.release();
}

json dataset_info(const fpnet::Dataset& d) {
  json info = {{"kind", fpnet::to_string(d.kind)},
               {"count", d.count()},
               {"has_ground_truth", d.ground_truth.has_value()},
               {"optics", fpnet::io::optics_to_json(d.cfg)},
               {"provenance", d.provenance}};
  if (d.kind == fpnet::DatasetKind::Fp) info["mode"] = fpnet::to_string(d.mode);
  if (!d.measurements.empty())
    info["measurement_shape"] = {d.measurements.front().side(), d.measurements.front().side()};
  if (!d.patterns.empty()) info["pattern_shape"] = {d.patterns.front().side(), d.patterns.front().side()};
  return info;
}

void reconstruct(const fpnet_dataset* dataset, const char* config, const char* source, bool is_path,
                 const fpnet_options* options, const char* checkpoint_dir, const char* resume_dir,
                 fpnet_result** out) {
  need(dataset, "dataset");
  need(out, "out");
  *out = nullptr;
  auto file_cfg = fpnet::io::recon_config_from(located(config, source, is_path));
  apply(options, file_cfg.recon);

  fpnet::RunHooks hooks;
  fpnet::Checkpoint resume;
  if (resume_dir) {
    resume = fpnet::io::load_checkpoint(resume_dir);
    hooks.resume = &resume;
  }
  if (checkpoint_dir && file_cfg.checkpoint_every) {
    const fs::path dir = checkpoint_dir;
    const std::size_t every = file_cfg.checkpoint_every;
    hooks.on_epoch = [dir, every](const fpnet::Checkpoint& c) {
      if (c.epochs_done % every == 0) fpnet::io::save_checkpoint(dir, c);
    };
  }
  auto r = std::make_unique<fpnet_result>();
  r->config = file_cfg.recon;
  r->result = fpnet::run_reconstruction(dataset->data, file_cfg.recon, hooks);
  r->dataset_info = dataset_info(dataset->data);
  *out = r.release();
}

json result_summary(const fpnet_result& r) {
  const auto& m = r.result.metrics;
  json s = {{"config", fpnet::io::recon_config_json(r.config)},
            {"dataset", r.dataset_info},
            {"update_count", m.update_count},
            {"epochs_recorded", m.loss_per_epoch.size()},
            {"warnings", m.warnings},
            {"rendering", {{"amplitude", fpnet::io::kAmplitudeRendering}, {"phase", fpnet::io::kPhaseRendering}}}};
  s["final_loss"] = m.loss_per_epoch.empty() ? json(nullptr) : json(m.loss_per_epoch.back());
  s["final_rel_error"] = m.rel_error_per_epoch.empty() ? json(nullptr) : json(m.rel_error_per_epoch.back());
  if (!r.config.deterministic) s["wall_time_s"] = m.wall_time_s;
  return s;
}

void render_complex(const fs::path& out, const std::string& stem, const fpnet::ComplexGrid& z, json& written) {
  fpnet::RealGrid amp(z.side()), phase(z.side());
  for (std::size_t i = 0; i < z.size(); ++i) {
    amp[i] = std::abs(z[i]);
    phase[i] = std::arg(z[i]);
  }
  fpnet::io::write_amplitude_png(out / (stem + "_amplitude.png"), amp);
  fpnet::io::write_phase_png(out / (stem + "_phase.png"), phase);
  written.push_back(stem + "_amplitude.png");
  written.push_back(stem + "_phase.png");
}

void render_real(const fs::path& out, const std::string& name, const fpnet::RealGrid& g, json& written) {
  fpnet::io::write_amplitude_png(out / name, g);
  written.push_back(name);
}

}  // namespace

extern "C" {

const char* fpnet_version(void) { return FPNET_VERSION; }

const char* fpnet_last_error(void) { return g_last_error.c_str(); }

void fpnet_options_init(fpnet_options* options) {
  if (!options) return;
  options->has_seed = 0;
  options->seed = 0;
  options->deterministic = -1;
  options->threads = 0;
}

void fpnet_string_free(char* text) { std::free(text); }

fpnet_status fpnet_dataset_simulate_file(const char* config_path, const fpnet_options* options,
                                         fpnet_dataset** out) {
  return guarded([&] { simulate(config_path, nullptr, true, options, out); });
}

fpnet_status fpnet_dataset_simulate_json(const char* config_text, const char* source,
                                         const fpnet_options* options, fpnet_dataset** out) {
  return guarded([&] { simulate(config_text, source, false, options, out); });
}

fpnet_status fpnet_dataset_load(const char* dir, fpnet_dataset** out) {
  return guarded([&] {
    need(dir, "dir");
    need(out, "out");
    *out = nullptr;
    auto ds = std::make_unique<fpnet_dataset>();
    ds->data = fpnet::io::load_dataset(dir);
    *out = ds.release();
  });
}

fpnet_status fpnet_dataset_save(const fpnet_dataset* dataset, const char* dir) {
  return guarded([&] {
    need(dataset, "dataset");
    need(dir, "dir");
    fpnet::io::save_dataset(dataset->data, dir);
  });
}

fpnet_status fpnet_dataset_info(const fpnet_dataset* dataset, char** json_out) {
  return guarded([&] {
    need(dataset, "dataset");
    need(json_out, "json_out");
    *json_out = dup_string(dataset_info(dataset->data).dump(2));
  });
}

int fpnet_dataset_equal(const fpnet_dataset* a, const fpnet_dataset* b) {
  if (!a || !b) return 0;
  return a->data == b->data ? 1 : 0;
}

void fpnet_dataset_free(fpnet_dataset* dataset) { delete dataset; }

fpnet_status fpnet_reconstruct_file(const fpnet_dataset* dataset, const char* config_path,
                                    const fpnet_options* options, const char* checkpoint_dir,
                                    const char* resume_dir, fpnet_result** out) {
  return guarded([&] { reconstruct(dataset, config_path, nullptr, true, options, checkpoint_dir, resume_dir, out); });
}

fpnet_status fpnet_reconstruct_json(const fpnet_dataset* dataset, const char* config_text, const char* source,
                                    const fpnet_options* options, const char* checkpoint_dir,
                                    const char* resume_dir, fpnet_result** out) {
  return guarded([&] { reconstruct(dataset, config_text, source, false, options, checkpoint_dir, resume_dir, out); });
}

fpnet_status fpnet_result_save(const fpnet_result* result, const char* dir) {
  return guarded([&] {
    need(result, "result");
    need(dir, "dir");
    fpnet::io::write_recon_outputs(dir, result->result, result->config, {{"dataset", result->dataset_info}});
  });
}

fpnet_status fpnet_result_summary(const fpnet_result* result, char** json_out) {
  return guarded([&] {
    need(result, "result");
    need(json_out, "json_out");
    *json_out = dup_string(result_summary(*result).dump(2));
  });
}

fpnet_status fpnet_result_loss_csv(const fpnet_result* result, char** csv_out) {
  return guarded([&] {
    need(result, "result");
    need(csv_out, "csv_out");
    *csv_out = dup_string(fpnet::io::loss_csv(result->result.metrics));
  });
}

fpnet_status fpnet_result_object(const fpnet_result* result, double* real, double* imag, size_t capacity,
                                 size_t* side) {
  return guarded([&] {
    need(result, "result");
    const auto& z = result->result.object;
    if (side) *side = z.side();
    if (!real && !imag) return;
    if (capacity < z.size())
      fpnet::fail(fpnet::ErrorCode::Dimension, "buffer holds " + std::to_string(capacity) + " values, object has " +
                                                   std::to_string(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (real) real[i] = z[i].real();
      if (imag) imag[i] = z[i].imag();
    }
  });
}

void fpnet_result_free(fpnet_result* result) { delete result; }

fpnet_status fpnet_gradcheck(const char* model, const char* loss, size_t size, uint64_t seed, int corrupt,
                             char** report_json, int* passed) {
  return guarded([&] {
    need(model, "model");
    need(loss, "loss");
    if (size < 2 || size > 64)
      fpnet::fail(fpnet::ErrorCode::InvalidArgument, "gradcheck size must be in [2, 64]");
    const auto target = fpnet::parse_loss_target(model);
    const auto norm = fpnet::parse_loss_norm(loss);
    const auto r = fpnet::finite_diff_check(target, norm, size, seed, 1e-5, corrupt != 0);
    const double tol = fpnet::gradcheck_tolerance(norm);
    const bool ok = r.max_rel_error <= tol;
    if (passed) *passed = ok ? 1 : 0;
    if (report_json)
      *report_json = dup_string(json{{"model", model},
                                     {"loss", loss},
                                     {"size", size},
                                     {"seed", seed},
                                     {"corrupted", corrupt != 0},
                                     {"max_rel_error", r.max_rel_error},
                                     {"tolerance", tol},
                                     {"checked", r.checked},
                                     {"excluded_kinks", r.excluded_kinks},
                                     {"passed", ok}}
                                    .dump());
  });
}

fpnet_status fpnet_sweep_file(const fpnet_dataset* dataset, const char* config_path, const fpnet_options* options,
                              const char* out_dir, char** summary_json) {
  return guarded([&] {
    need(dataset, "dataset");
    need(out_dir, "out_dir");
    auto cfg = fpnet::io::sweep_config_from(located(config_path, nullptr, true));
    apply(options, cfg.base);
    const auto cells = fpnet::benchmark_sweep(dataset->data, cfg.base, cfg.axes);
    const auto files = fpnet::io::write_sweep_outputs(out_dir, cells, cfg.axes);
    json list = json::array();
    for (const auto& c : cells) {
      json j = {{"model", fpnet::to_string(c.loss.target)},
                {"loss", fpnet::to_string(c.loss.norm)},
                {"optimizer", fpnet::to_string(c.optimizer)},
                {"batch_size", c.batch_size},
                {"lr", c.lr}};
      if (c.metrics) {
        j["update_count"] = c.metrics->update_count;
        j["final_loss"] = c.metrics->loss_per_epoch.empty() ? json(nullptr) : json(c.metrics->loss_per_epoch.back());
        if (!c.metrics->rel_error_per_epoch.empty()) j["final_rel_error"] = c.metrics->rel_error_per_epoch.back();
      } else {
        j["error"] = c.error;
      }
      list.push_back(j);
    }
    const json summary = {{"base", fpnet::io::recon_config_json(cfg.base)}, {"cells", list}, {"files", files}};
    fpnet::io::write_text_file(fs::path(out_dir) / "sweep_summary.json", summary.dump(2) + "\n");
    if (summary_json) *summary_json = dup_string(summary.dump(2));
  });
}

fpnet_status fpnet_render(const char* input_dir, const char* out_dir, char** written_json) {
  return guarded([&] {
    need(input_dir, "input_dir");
    need(out_dir, "out_dir");
    const fs::path in = input_dir, out = out_dir;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fpnet::fail(fpnet::ErrorCode::Io, "cannot create '" + out.string() + "': " + ec.message());
    json written = json::array();
    if (fs::exists(in / "manifest.json")) {
      const auto ds = fpnet::io::load_dataset(in);
      char name[64];
      for (std::size_t i = 0; i < ds.measurements.size(); ++i) {
        std::snprintf(name, sizeof name, "measurement_%04zu.png", i);
        render_real(out, name, ds.measurements[i].data, written);
      }
      for (std::size_t i = 0; i < ds.patterns.size(); ++i) {
        std::snprintf(name, sizeof name, "pattern_%04zu.png", i);
        render_real(out, name, ds.patterns[i], written);
      }
      if (ds.ground_truth) render_complex(out, "ground_truth", ds.ground_truth->complex(), written);
    } else if (fs::exists(in / "summary.json")) {
      const json summary = fpnet::io::read_json_file(in / "summary.json");
      if (!summary.contains("object"))
        fpnet::fail(fpnet::ErrorCode::Io, "'" + in.string() + "/summary.json' has no object entry");
      render_complex(out, "object", fpnet::io::read_complex(in, summary.at("object")), written);
    } else {
      fpnet::fail(fpnet::ErrorCode::Io, "'" + in.string() + "' is neither a dataset nor a reconstruction");
    }
    if (written_json) *written_json = dup_string(written.dump());
  });
}

fpnet_status fpnet_fuse_color(const char* red_png, const char* green_png, const char* blue_png, const char* out_png) {
  return guarded([&] {
    need(red_png, "red_png");
    need(green_png, "green_png");
    need(blue_png, "blue_png");
    need(out_png, "out_png");
    fpnet::io::fuse_color(red_png, green_png, blue_png, out_png);
  });
}

}  // extern "C"
