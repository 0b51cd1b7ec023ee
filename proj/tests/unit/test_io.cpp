#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>

#include "core/engine.hpp"
#include "core/error.hpp"
#include "helpers.hpp"
#include "io/config.hpp"
#include "io/dataset_io.hpp"
#include "io/plot.hpp"
#include "io/png.hpp"
#include "io/raw.hpp"
#include "io/results.hpp"
#include "io/scenario.hpp"

using namespace fpnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fpnet_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

io::SimulateConfig sim_config(const std::string& text) {
  return io::simulate_config_from(io::parse_located(text, "test.json"));
}

std::string config_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

const char* kSmallFp = R"({
  "kind": "fp",
  "seed": 3,
  "optics": {"n_high": 32, "stride": 4},
  "illumination": {"grid": [3, 3], "step": 0.05},
  "mode": "crop"
})";

}  // namespace

TEST_CASE("raw float32 files are little-endian") {
  const fs::path dir = scratch("raw");
  const std::vector<double> v{1.0, -2.5, 0.1};
  io::write_f32(dir / "a.f32", v);
  const std::string bytes = slurp(dir / "a.f32");
  REQUIRE(bytes.size() == 12);
  CHECK(static_cast<unsigned char>(bytes[3]) == 0x3f);  // 1.0f = 0x3f800000
  CHECK(static_cast<unsigned char>(bytes[2]) == 0x80);
  const auto back = io::read_f32(dir / "a.f32", 3);
  CHECK(back[0] == 1.0);
  CHECK(back[1] == -2.5);
  CHECK(back[2] == static_cast<double>(0.1f));
  CHECK_THROWS_AS(io::read_f32(dir / "a.f32", 4), Error);
}

TEST_CASE("dataset round trip is bit-exact") {
  for (const char* kind : {"fp", "sim", "spi"}) {
    CAPTURE(kind);
    std::string text;
    if (std::string(kind) == "fp") text = kSmallFp;
    if (std::string(kind) == "sim")
      text = R"({"kind": "sim", "optics": {"n_high": 32, "stride": 1}})";
    if (std::string(kind) == "spi")
      text = R"({"kind": "spi", "optics": {"n_high": 8, "stride": 1}, "spi": {"count": 64}})";
    Dataset d = io::build_dataset(sim_config(text));
    quantize_to_float32(d);
    const fs::path dir = scratch(std::string("roundtrip_") + kind);
    io::save_dataset(d, dir);
    const Dataset back = io::load_dataset(dir);
    CHECK(back == d);

    const fs::path again = scratch(std::string("roundtrip2_") + kind);
    io::save_dataset(io::load_dataset(dir), again);
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file())
        CHECK(slurp(entry.path()) == slurp(again / fs::relative(entry.path(), dir)));
  }
}

TEST_CASE("dataset loading validates the manifest") {
  Dataset d = io::build_dataset(sim_config(kSmallFp));
  quantize_to_float32(d);
  const fs::path dir = scratch("manifest");
  io::save_dataset(d, dir);

  SUBCASE("missing array file") {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".f32") {
        fs::remove(entry.path());
        break;
      }
    CHECK_THROWS_AS(io::load_dataset(dir), Error);
  }
  SUBCASE("truncated array file") {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".f32") {
        fs::resize_file(entry.path(), 8);
        break;
      }
    CHECK_THROWS_AS(io::load_dataset(dir), Error);
  }
  SUBCASE("manifest declares its format") {
    const auto manifest = io::read_json_file(dir / "manifest.json");
    CHECK(manifest.at("format") == io::kDatasetFormat);
    CHECK(manifest.contains("version"));
  }
}

TEST_CASE("config errors carry file and line") {
  SUBCASE("unknown key") {
    const std::string msg = config_error([] {
      (void)sim_config("{\n  \"kind\": \"fp\",\n  \"optics\": {\"n_high\": 32},\n  \"colour\": 1\n}");
    });
    CHECK(msg.find("test.json:4") != std::string::npos);
    CHECK(msg.find("colour") != std::string::npos);
  }
  SUBCASE("wrong type") {
    const std::string msg = config_error([] {
      (void)sim_config("{\n  \"kind\": \"fp\",\n  \"optics\": {\n    \"na\": \"wide\"\n  }\n}");
    });
    CHECK(msg.find("test.json:4") != std::string::npos);
  }
  SUBCASE("n_high not divisible by stride") {
    const std::string msg = config_error(
        [] { (void)sim_config(R"({"kind": "fp", "optics": {"n_high": 30, "stride": 4}})"); });
    CHECK(msg.find("divisible") != std::string::npos);
  }
  SUBCASE("syntax error") {
    const std::string msg = config_error([] { (void)sim_config("{\n  \"kind\": \"fp\",\n  oops\n}"); });
    CHECK(msg.find("test.json:3") != std::string::npos);
  }
  SUBCASE("empty sweep axis") {
    const std::string msg = config_error([] {
      (void)io::sweep_config_from(io::parse_located(
          R"({"base": {"model": "intensity", "loss": "l1"}, "axes": {"lr": []}})", "sweep.json"));
    });
    CHECK(msg.find("non-empty") != std::string::npos);
  }
}

TEST_CASE("recon config parsing") {
  const auto cfg = io::recon_config_from(io::parse_located(
      R"({"model": "exitwave", "loss": "l2", "optimizer": {"kind": "rmsprop", "lr": 0.5, "decay": 0.8},
          "batch_size": 3, "epochs": 7, "order": "shuffled", "seed": 9, "init": "ones",
          "checkpoint_every": 2})",
      "r.json"));
  CHECK(cfg.recon.loss.target == LossTarget::ExitWave);
  CHECK(cfg.recon.loss.norm == LossNorm::L2);
  CHECK(cfg.recon.optimizer.kind == OptimizerKind::RmsProp);
  CHECK(cfg.recon.optimizer.decay == 0.8);
  CHECK(cfg.recon.batch_size == 3);
  CHECK(cfg.recon.epochs == 7);
  CHECK(cfg.recon.order == BatchOrder::Shuffled);
  CHECK(cfg.recon.init == InitKind::Ones);
  CHECK(cfg.checkpoint_every == 2);
}

TEST_CASE("sweep config scales every lr") {
  const auto cfg = io::sweep_config_from(io::parse_located(
      R"({"base": {"model": "intensity", "loss": "l1"}, "axes": {"lr_grid": [1, 3]}, "lr_scale": 0.001})",
      "s.json"));
  CHECK(cfg.axes.lr_grid == std::vector<double>{0.001, 0.003});
}

TEST_CASE("png round trip") {
  const fs::path dir = scratch("png");
  for (int depth : {8, 16}) {
    io::PngImage img;
    img.width = 5;
    img.height = 3;
    img.bit_depth = depth;
    img.channels = depth == 8 ? 3 : 1;
    for (std::size_t i = 0; i < img.width * img.height * img.channels; ++i)
      img.samples.push_back(static_cast<std::uint16_t>((i * 4099) % (img.max_code() + 1u)));
    const fs::path p = dir / ("img" + std::to_string(depth) + ".png");
    io::write_png(p, img);
    const io::PngImage back = io::read_png(p);
    CHECK(back.width == 5);
    CHECK(back.height == 3);
    CHECK(back.bit_depth == depth);
    CHECK(back.channels == img.channels);
    CHECK(back.samples == img.samples);
  }
  std::ofstream(dir / "junk.png") << "not a png";
  CHECK_THROWS_AS(io::read_png(dir / "junk.png"), Error);
}

TEST_CASE("rendering conventions") {
  const fs::path dir = scratch("render");
  RealGrid phase(2);
  phase[0] = -std::numbers::pi;
  phase[1] = 0.0;
  phase[2] = std::numbers::pi;
  phase[3] = 4.0;
  io::write_phase_png(dir / "phase.png", phase);
  const io::PngImage p = io::read_png(dir / "phase.png");
  CHECK(p.samples[0] == 0);
  CHECK((p.samples[1] == 127 || p.samples[1] == 128));
  CHECK(p.samples[2] == 255);
  CHECK(p.samples[3] == 255);

  RealGrid amp(2);
  amp[1] = 2.0;
  amp[2] = 1.0;
  io::write_amplitude_png(dir / "amp.png", amp);
  const io::PngImage a = io::read_png(dir / "amp.png");
  CHECK(a.samples[0] == 0);
  CHECK(a.samples[1] == 255);
  CHECK((a.samples[2] == 127 || a.samples[2] == 128));

  io::fuse_color(dir / "phase.png", dir / "amp.png", dir / "phase.png", dir / "rgb.png");
  const io::PngImage rgb = io::read_png(dir / "rgb.png");
  CHECK(rgb.channels == 3);
  CHECK(rgb.samples[3] == p.samples[1]);
  CHECK(rgb.samples[4] == a.samples[1]);

  RealGrid big(4);
  io::write_amplitude_png(dir / "big.png", big);
  CHECK_THROWS_AS(io::fuse_color(dir / "phase.png", dir / "big.png", dir / "phase.png", dir / "x.png"), Error);
}

TEST_CASE("16-bit measurement import records the code range") {
  const fs::path dir = scratch("import");
  std::vector<std::string> names;
  for (int n = 0; n < 9; ++n) {
    io::PngImage img;
    img.width = img.height = 8;
    img.bit_depth = 16;
    for (int i = 0; i < 64; ++i) img.samples.push_back(static_cast<std::uint16_t>(1000 * n + 10 * i));
    names.push_back("m" + std::to_string(n) + ".png");
    io::write_png(dir / names.back(), img);
  }
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "\"" : ", \"") + n + "\"";
  const std::string text = R"({"kind": "fp", "optics": {"n_high": 32, "stride": 4},
    "illumination": {"grid": [3, 3], "step": 0.05}, "measurements_png": [)" + list + "]}";
  std::ofstream(dir / "cfg.json") << text;
  const Dataset d = io::build_dataset(io::simulate_config_from(io::load_located(dir / "cfg.json")));
  REQUIRE(d.count() == 9);
  CHECK(d.measurements[2].data(0, 1) == 2010.0);
  CHECK(!d.ground_truth.has_value());
  const auto& range = d.provenance.at("png_range");
  CHECK(range.at("bit_depth") == 16);
  CHECK(range.at("max_code") == 8630);
}

TEST_CASE("plot rendering") {
  io::Plot plot;
  plot.title = "Loss";
  plot.x_label = "epoch";
  plot.y_label = "loss";
  plot.series.push_back({"lr 0.01", {1, 2, 3}, {1e4, 3e3, 1e3}});
  plot.series.push_back({"lr 0.1", {1, 2, 3}, {1e4, 0.0, 2e2}});
  const io::PngImage img = io::render_plot(plot);
  CHECK(img.width == 760);
  CHECK(img.height == 480);
  CHECK(img.channels == 3);
  std::set<std::uint16_t> colors(img.samples.begin(), img.samples.end());
  CHECK(colors.size() > 3);
}

TEST_CASE("loss csv") {
  RunMetrics m;
  m.loss_per_update = {4.0, 3.0, 2.0, 1.0};
  m.epoch_of_update = {0, 0, 1, 1};
  m.loss_per_epoch = {3.5, 1.5};
  m.rel_error_per_epoch = {0.5, 0.25};
  m.update_count = 4;
  std::istringstream csv(io::loss_csv(m));
  std::vector<std::string> lines;
  for (std::string line; std::getline(csv, line);) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "update_index,epoch,loss,rel_error");
  CHECK(lines[1] == "0,1,4,");
  CHECK(lines[2] == "1,1,3,0.5");
  CHECK(lines[4] == "3,2,1,0.25");

  const RunMetrics back = io::metrics_from_json(io::metrics_json(m));
  CHECK(back.loss_per_update == m.loss_per_update);
  CHECK(back.loss_per_epoch == m.loss_per_epoch);
}

TEST_CASE("checkpoint round trip") {
  Checkpoint c;
  c.params = {1.0, 2.0, 3.0, 4.0};
  c.state.m = {0.5, 0.25, 0.0, -1.0};
  c.state.v = {1.0, 1.0, 2.0, 4.0};
  c.state.step_count = 17;
  c.epochs_done = 3;
  c.metrics.loss_per_epoch = {3.0, 2.0, 1.0};
  c.metrics.update_count = 17;
  const fs::path dir = scratch("checkpoint");
  io::save_checkpoint(dir, c);
  const Checkpoint back = io::load_checkpoint(dir);
  CHECK(back.params == c.params);
  CHECK(back.state.m == c.state.m);
  CHECK(back.state.v == c.state.v);
  CHECK(back.state.step_count == 17);
  CHECK(back.epochs_done == 3);
  CHECK(back.metrics.loss_per_epoch == c.metrics.loss_per_epoch);
}

TEST_CASE("sweep outputs") {
  SweepCell a, b;
  a.lr = 0.01;
  b.lr = 0.1;
  RunMetrics m;
  m.loss_per_update = {2.0, 1.0};
  m.epoch_of_update = {0, 0};
  m.loss_per_epoch = {1.0};
  m.update_count = 2;
  a.metrics = m;
  b.error = "diverged";
  SweepAxes axes;
  axes.lr = {0.01, 0.1};
  const fs::path dir = scratch("sweep");
  const auto files = io::write_sweep_outputs(dir, {a, b}, axes);
  for (const auto& f : files) CHECK(fs::exists(dir / f));
  CHECK(fs::exists(dir / "loss_vs_epoch_by_lr.png"));
  CHECK(fs::exists(dir / "loss_vs_update_by_lr.png"));
  const std::string cells = slurp(dir / "sweep_cells.csv");
  CHECK(cells.find("diverged") != std::string::npos);
}
