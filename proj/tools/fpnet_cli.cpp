// Command-line front end over the fpnet C API.

#include <fpnet/fpnet.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  unsigned threads = 0;
};

// Thrown after an API failure has been reported.
struct Failed {
  int code;
};

int exit_code(fpnet_status s) { return s == FPNET_ERR_CONFIG || s == FPNET_ERR_INVALID_ARGUMENT ? 2 : 1; }

void check(fpnet_status s, const char* what) {
  if (s == FPNET_OK) return;
  std::cerr << "fpnet " << what << ": " << fpnet_last_error() << "\n";
  throw Failed{exit_code(s)};
}

std::string take(char* text) {
  std::string s = text ? text : "";
  fpnet_string_free(text);
  return s;
}

fpnet_options options(const Globals& g) {
  fpnet_options o;
  fpnet_options_init(&o);
  if (g.seed) {
    o.has_seed = 1;
    o.seed = *g.seed;
  }
  if (g.deterministic) o.deterministic = 1;
  o.threads = g.threads;
  return o;
}

void need(const std::string& value, const char* flag, const char* verb) {
  if (value.empty()) {
    std::cerr << "fpnet " << verb << ": " << flag << " is required\n";
    throw Failed{2};
  }
}

struct Dataset {
  fpnet_dataset* p = nullptr;
  ~Dataset() { fpnet_dataset_free(p); }
};

struct Result {
  fpnet_result* p = nullptr;
  ~Result() { fpnet_result_free(p); }
};

int cmd_simulate(const Globals& g) {
  need(g.config, "--config", "simulate");
  need(g.out, "--out", "simulate");
  const auto o = options(g);
  Dataset ds;
  check(fpnet_dataset_simulate_file(g.config.c_str(), &o, &ds.p), "simulate");
  check(fpnet_dataset_save(ds.p, g.out.c_str()), "simulate");
  char* info = nullptr;
  check(fpnet_dataset_info(ds.p, &info), "simulate");
  const json j = json::parse(take(info));
  std::cout << "wrote " << j["kind"].get<std::string>() << " dataset with " << j["count"] << " records to "
            << g.out << "\n";
  return 0;
}

int cmd_reconstruct(const Globals& g, const std::string& data, const std::string& checkpoint_dir,
                    const std::string& resume, const std::vector<std::string>& fuse) {
  need(g.out, "--out", "reconstruct");
  if (!fuse.empty()) {
    fs::create_directories(g.out);
    const std::string target = (fs::path(g.out) / "fused_color.png").string();
    check(fpnet_fuse_color(fuse[0].c_str(), fuse[1].c_str(), fuse[2].c_str(), target.c_str()), "fuse-color");
    std::cout << "wrote " << target << "\n";
    return 0;
  }
  need(data, "--data", "reconstruct");
  need(g.config, "--config", "reconstruct");
  const auto o = options(g);
  Dataset ds;
  check(fpnet_dataset_load(data.c_str(), &ds.p), "reconstruct");
  Result r;
  check(fpnet_reconstruct_file(ds.p, g.config.c_str(), &o, checkpoint_dir.empty() ? nullptr : checkpoint_dir.c_str(),
                               resume.empty() ? nullptr : resume.c_str(), &r.p),
        "reconstruct");
  check(fpnet_result_save(r.p, g.out.c_str()), "reconstruct");
  char* summary = nullptr;
  check(fpnet_result_summary(r.p, &summary), "reconstruct");
  const json s = json::parse(take(summary));
  for (const auto& w : s["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  std::cout << "updates " << s["update_count"] << ", final loss " << s["final_loss"];
  if (!s["final_rel_error"].is_null()) std::cout << ", relative error " << s["final_rel_error"];
  if (s.contains("wall_time_s")) std::cout << ", " << s["wall_time_s"] << " s";
  std::cout << "\n";
  return 0;
}

int cmd_gradcheck(const Globals& g, const std::string& model, const std::string& loss, std::size_t size,
                  bool corrupt) {
  const std::vector<std::string> models =
      model == "all" ? std::vector<std::string>{"intensity", "exitwave", "spi", "sim"} : std::vector{model};
  const std::vector<std::string> losses = loss == "all" ? std::vector<std::string>{"l1", "l2"} : std::vector{loss};
  const std::uint64_t seed = g.seed.value_or(0);
  bool all_ok = true;
  std::printf("%-10s %-4s %6s %12s %10s %8s %6s  %s\n", "model", "loss", "size", "max_rel_err", "tolerance",
              "checked", "kinks", "result");
  for (const auto& m : models)
    for (const auto& l : losses) {
      char* report = nullptr;
      int passed = 0;
      check(fpnet_gradcheck(m.c_str(), l.c_str(), size, seed, corrupt ? 1 : 0, &report, &passed), "gradcheck");
      const json r = json::parse(take(report));
      std::printf("%-10s %-4s %6zu %12.3e %10.0e %8zu %6zu  %s\n", m.c_str(), l.c_str(), size,
                  r["max_rel_error"].get<double>(), r["tolerance"].get<double>(), r["checked"].get<std::size_t>(),
                  r["excluded_kinks"].get<std::size_t>(), passed ? "PASS" : "FAIL");
      all_ok = all_ok && passed;
    }
  return all_ok ? 0 : 1;
}

int cmd_sweep(const Globals& g, const std::string& data) {
  need(data, "--data", "sweep");
  need(g.config, "--config", "sweep");
  need(g.out, "--out", "sweep");
  const auto o = options(g);
  Dataset ds;
  check(fpnet_dataset_load(data.c_str(), &ds.p), "sweep");
  char* summary = nullptr;
  check(fpnet_sweep_file(ds.p, g.config.c_str(), &o, g.out.c_str(), &summary), "sweep");
  const json s = json::parse(take(summary));
  int failed = 0;
  for (const auto& c : s["cells"]) {
    std::cout << c["model"].get<std::string>() << " " << c["loss"].get<std::string>() << " "
              << c["optimizer"].get<std::string>() << " batch " << c["batch_size"] << " lr " << c["lr"];
    if (c.contains("error")) {
      std::cout << ": failed: " << c["error"].get<std::string>() << "\n";
      ++failed;
    } else {
      std::cout << ": final loss " << c["final_loss"] << "\n";
    }
  }
  std::cout << "wrote " << s["files"].size() << " files to " << g.out << "\n";
  return failed ? 1 : 0;
}

int cmd_render(const Globals& g, const std::string& input) {
  need(input, "--input", "render");
  need(g.out, "--out", "render");
  char* written = nullptr;
  check(fpnet_render(input.c_str(), g.out.c_str(), &written), "render");
  std::cout << "wrote " << json::parse(take(written)).size() << " images to " << g.out << "\n";
  return 0;
}

int cmd_info(const std::string& data) {
  need(data, "--data", "info");
  Dataset ds;
  check(fpnet_dataset_load(data.c_str(), &ds.p), "info");
  char* info = nullptr;
  check(fpnet_dataset_info(ds.p, &info), "info");
  std::cout << take(info) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier ptychography, structured illumination and single-pixel reconstruction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fpnet_version()));

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "seed overriding the config");
  app.add_flag("--deterministic", g.deterministic, "fixed reduction order; bit-identical reruns");
  app.add_option("--threads", g.threads, "worker threads (0 keeps the config value)");

  std::string data, checkpoint_dir, resume, input, model = "all", loss = "all";
  std::vector<std::string> fuse;
  std::size_t size = 8;
  bool corrupt = false;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset from --config");
  auto* rec = app.add_subcommand("reconstruct", "reconstruct a dataset with --config");
  rec->add_option("--data", data, "dataset directory");
  rec->add_option("--checkpoint-dir", checkpoint_dir, "write checkpoints here (config checkpoint_every)");
  rec->add_option("--resume", resume, "continue from a checkpoint directory");
  rec->add_option("--fuse-color", fuse, "fuse three grayscale PNGs (r g b) into one RGB PNG")->expected(3);
  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the analytic gradients");
  gc->add_option("--model", model, "intensity, exitwave, spi, sim or all");
  gc->add_option("--loss", loss, "l1, l2 or all");
  gc->add_option("--size", size, "problem side length");
  gc->add_flag("--corrupt-gradient", corrupt, "bias the analytic gradient (negative control)");
  auto* sw = app.add_subcommand("sweep", "benchmark sweep over a dataset");
  sw->add_option("--data", data, "dataset directory");
  auto* render = app.add_subcommand("render", "render a dataset or reconstruction directory to PNG");
  render->add_option("--input", input, "dataset or reconstruction directory");
  auto* info = app.add_subcommand("info", "describe a dataset");
  info->add_option("--data", data, "dataset directory");
  for (auto* sub : {sim, rec, gc, sw, render, info}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count()) g.seed = seed;

  try {
    if (*sim) return cmd_simulate(g);
    if (*rec) return cmd_reconstruct(g, data, checkpoint_dir, resume, fuse);
    if (*gc) return cmd_gradcheck(g, model, loss, size, corrupt);
    if (*sw) return cmd_sweep(g, data);
    if (*render) return cmd_render(g, input);
    if (*info) return cmd_info(data);
  } catch (const Failed& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "fpnet: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
