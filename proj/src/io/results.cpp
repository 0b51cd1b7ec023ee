#include "results.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "dataset_io.hpp"
#include "plot.hpp"
#include "png.hpp"
#include "raw.hpp"

namespace fpnet::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
}

}  // namespace

std::string loss_csv(const RunMetrics& m) {
  std::ostringstream out;
  out << "update_index,epoch,loss,rel_error\n";
  const std::size_t n = m.loss_per_update.size();
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t e = m.epoch_of_update[u];
    out << u << ',' << e + 1 << ',' << num(m.loss_per_update[u]) << ',';
    const bool last_of_epoch = u + 1 == n || m.epoch_of_update[u + 1] != e;
    if (last_of_epoch && e < m.rel_error_per_epoch.size()) out << num(m.rel_error_per_epoch[e]);
    out << '\n';
  }
  return out.str();
}

std::string epochs_csv(const RunMetrics& m) {
  std::ostringstream out;
  out << "epoch,loss,rel_error,band_low,band_high\n";
  for (std::size_t e = 0; e < m.loss_per_epoch.size(); ++e) {
    out << e + 1 << ',' << num(m.loss_per_epoch[e]) << ',';
    if (e < m.rel_error_per_epoch.size()) out << num(m.rel_error_per_epoch[e]);
    out << ',';
    if (e < m.band_error_per_epoch.size())
      out << num(m.band_error_per_epoch[e].low) << ',' << num(m.band_error_per_epoch[e].high);
    else
      out << ',';
    out << '\n';
  }
  return out.str();
}

json recon_config_json(const ReconConfig& cfg) {
  const auto& o = cfg.optimizer;
  return {{"model", to_string(cfg.loss.target)},
          {"loss", to_string(cfg.loss.norm)},
          {"optimizer",
           {{"kind", to_string(o.kind)},
            {"lr", o.lr},
            {"momentum", o.momentum},
            {"decay", o.decay},
            {"beta1", o.beta1},
            {"beta2", o.beta2},
            {"epsilon", o.epsilon}}},
          {"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},
          {"order", cfg.order == BatchOrder::Shuffled ? "shuffled" : "sequential"},
          {"init", to_string(cfg.init)},
          {"seed", cfg.seed},
          {"deterministic", cfg.deterministic},
          {"threads", cfg.threads},
          {"max_updates", cfg.max_updates}};
}

json metrics_json(const RunMetrics& m) {
  json bands = json::array();
  for (const auto& b : m.band_error_per_epoch) bands.push_back({b.low, b.high});
  return {{"loss_per_update", m.loss_per_update},
          {"epoch_of_update", m.epoch_of_update},
          {"loss_per_epoch", m.loss_per_epoch},
          {"rel_error_per_epoch", m.rel_error_per_epoch},
          {"band_error_per_epoch", bands},
          {"warnings", m.warnings},
          {"update_count", m.update_count}};
}

RunMetrics metrics_from_json(const json& j) {
  RunMetrics m;
  try {
    m.loss_per_update = j.at("loss_per_update").get<std::vector<double>>();
    m.epoch_of_update = j.at("epoch_of_update").get<std::vector<std::size_t>>();
    m.loss_per_epoch = j.at("loss_per_epoch").get<std::vector<double>>();
    m.rel_error_per_epoch = j.at("rel_error_per_epoch").get<std::vector<double>>();
    for (const auto& b : j.at("band_error_per_epoch")) m.band_error_per_epoch.push_back({b.at(0), b.at(1)});
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    m.update_count = j.at("update_count").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, std::string("checkpoint metrics: ") + e.what());
  }
  return m;
}

void write_recon_outputs(const fs::path& dir, const ReconResult& result, const ReconConfig& cfg,
                         const json& extra) {
  make_dir(dir);
  const ComplexGrid& z = result.object;
  RealGrid amp(z.side()), phase(z.side());
  for (std::size_t i = 0; i < z.size(); ++i) {
    amp[i] = std::abs(z[i]);
    phase[i] = std::arg(z[i]);
  }
  write_amplitude_png(dir / "amplitude.png", amp);
  write_phase_png(dir / "phase.png", phase);
  const json object_entry = write_complex(dir, "object.f32", z);
  write_text_file(dir / "loss.csv", loss_csv(result.metrics));
  write_text_file(dir / "epochs.csv", epochs_csv(result.metrics));

  const RunMetrics& m = result.metrics;
  json summary = {{"config", recon_config_json(cfg)},
                  {"update_count", m.update_count},
                  {"epochs_recorded", m.loss_per_epoch.size()},
                  {"warnings", m.warnings},
                  {"object", object_entry},
                  {"rendering", {{"amplitude", kAmplitudeRendering}, {"phase", kPhaseRendering}}},
                  {"files", {"amplitude.png", "phase.png", "object.f32", "loss.csv", "epochs.csv"}}};
  summary["final_loss"] = m.loss_per_epoch.empty() ? json(nullptr) : json(m.loss_per_epoch.back());
  summary["final_rel_error"] =
      m.rel_error_per_epoch.empty() ? json(nullptr) : json(m.rel_error_per_epoch.back());
  // Timing would make deterministic outputs differ between runs.
  if (!cfg.deterministic) summary["wall_time_s"] = m.wall_time_s;
  summary.update(extra);
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

void save_checkpoint(const fs::path& dir, const Checkpoint& ckpt) {
  make_dir(dir);
  write_f32(dir / "params.f32", ckpt.params);
  write_f32(dir / "m.f32", ckpt.state.m);
  write_f32(dir / "v.f32", ckpt.state.v);
  const json state = {{"format", "fpnet-checkpoint"},
                      {"version", "1.0"},
                      {"param_count", ckpt.params.size()},
                      {"moment_count", ckpt.state.m.size()},
                      {"dtype", "float32-le"},
                      {"step_count", ckpt.state.step_count},
                      {"epochs_done", ckpt.epochs_done},
                      {"metrics", metrics_json(ckpt.metrics)}};
  write_text_file(dir / "state.json", state.dump(1) + "\n");
}

Checkpoint load_checkpoint(const fs::path& dir) {
  const json s = read_json_file(dir / "state.json");
  Checkpoint c;
  try {
    if (s.at("format").get<std::string>() != "fpnet-checkpoint")
      fail(ErrorCode::Io, "'" + dir.string() + "' is not a checkpoint");
    const auto n = s.at("param_count").get<std::size_t>();
    const auto nm = s.at("moment_count").get<std::size_t>();
    c.params = read_f32(dir / "params.f32", n);
    c.state.m = read_f32(dir / "m.f32", nm);
    c.state.v = read_f32(dir / "v.f32", nm);
    c.state.step_count = s.at("step_count").get<std::uint64_t>();
    c.epochs_done = s.at("epochs_done").get<std::size_t>();
    c.metrics = metrics_from_json(s.at("metrics"));
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, "checkpoint '" + dir.string() + "': " + e.what());
  }
  return c;
}

std::string sweep_label(const SweepCell& cell, const std::string& axis) {
  if (axis == "lr") return "lr=" + short_num(cell.lr);
  if (axis == "optimizer") return to_string(cell.optimizer);
  if (axis == "batch_size") return "batch " + std::to_string(cell.batch_size);
  if (axis == "loss_case") return to_string(cell.loss.norm) + " " + to_string(cell.loss.target);
  return "lr=" + short_num(cell.lr) + " " + to_string(cell.optimizer) + " b" +
         std::to_string(cell.batch_size) + " " + to_string(cell.loss.norm) + " " +
         to_string(cell.loss.target);
}

namespace {

void cell_prefix(std::ostringstream& out, std::size_t i, const SweepCell& c) {
  out << i << ',' << to_string(c.loss.target) << ',' << to_string(c.loss.norm) << ','
      << to_string(c.optimizer) << ',' << c.batch_size << ',' << num(c.lr);
}

std::string csv_text(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
  return s;
}

}  // namespace

std::string sweep_series_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "cell,model,loss,optimizer,batch_size,lr,series,index,epoch,value\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (!c.metrics) continue;
    const auto& m = *c.metrics;
    for (std::size_t u = 0; u < m.loss_per_update.size(); ++u) {
      cell_prefix(out, i, c);
      out << ",update," << u << ',' << m.epoch_of_update[u] + 1 << ',' << num(m.loss_per_update[u]) << '\n';
    }
    for (std::size_t e = 0; e < m.loss_per_epoch.size(); ++e) {
      cell_prefix(out, i, c);
      out << ",epoch," << e + 1 << ',' << e + 1 << ',' << num(m.loss_per_epoch[e]) << '\n';
    }
    for (std::size_t e = 0; e < m.rel_error_per_epoch.size(); ++e) {
      cell_prefix(out, i, c);
      out << ",rel_error," << e + 1 << ',' << e + 1 << ',' << num(m.rel_error_per_epoch[e]) << '\n';
    }
  }
  return out.str();
}

std::string sweep_cells_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "cell,model,loss,optimizer,batch_size,lr,update_count,final_loss,final_rel_error,error\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    cell_prefix(out, i, c);
    out << ',';
    if (c.metrics) {
      const auto& m = *c.metrics;
      out << m.update_count << ',' << (m.loss_per_epoch.empty() ? "" : num(m.loss_per_epoch.back())) << ','
          << (m.rel_error_per_epoch.empty() ? "" : num(m.rel_error_per_epoch.back()));
    } else {
      out << ",,";
    }
    out << ',' << csv_text(c.error) << '\n';
  }
  return out.str();
}

std::vector<std::string> write_sweep_outputs(const fs::path& dir, const std::vector<SweepCell>& cells,
                                             const SweepAxes& axes) {
  make_dir(dir);
  write_text_file(dir / "sweep_series.csv", sweep_series_csv(cells));
  write_text_file(dir / "sweep_cells.csv", sweep_cells_csv(cells));
  std::vector<std::string> files{"sweep_series.csv", "sweep_cells.csv"};

  std::vector<std::string> populated;
  if (!axes.lr.empty()) populated.push_back("lr");
  if (!axes.optimizer.empty()) populated.push_back("optimizer");
  if (!axes.batch_size.empty()) populated.push_back("batch_size");
  if (!axes.loss_case.empty()) populated.push_back("loss_case");

  // One figure per axis: the slice of cells that share every other axis value
  // with the first cell, one curve per value of this axis.
  auto key_without = [&](const SweepCell& c, const std::string& axis) {
    std::string k;
    for (const auto& a : populated)
      if (a != axis) k += sweep_label(c, a) + "|";
    return k;
  };
  for (const auto& axis : populated) {
    if (cells.empty()) break;
    const std::string slice = key_without(cells.front(), axis);
    Plot by_epoch{"loss vs epoch by " + axis, "epoch", "loss", true, {}};
    Plot by_update{"loss vs update by " + axis, "update", "batch loss", true, {}};
    for (const auto& c : cells) {
      if (!c.metrics || key_without(c, axis) != slice) continue;
      Series se{sweep_label(c, axis), {}, c.metrics->loss_per_epoch};
      for (std::size_t e = 0; e < se.y.size(); ++e) se.x.push_back(static_cast<double>(e + 1));
      by_epoch.series.push_back(std::move(se));
      Series su{sweep_label(c, axis), {}, c.metrics->loss_per_update};
      for (std::size_t u = 0; u < su.y.size(); ++u) su.x.push_back(static_cast<double>(u + 1));
      by_update.series.push_back(std::move(su));
    }
    const std::string e_name = "loss_vs_epoch_by_" + axis + ".png";
    const std::string u_name = "loss_vs_update_by_" + axis + ".png";
    write_plot_png(dir / e_name, by_epoch);
    write_plot_png(dir / u_name, by_update);
    files.push_back(e_name);
    files.push_back(u_name);
  }
  return files;
}

}  // namespace fpnet::io
