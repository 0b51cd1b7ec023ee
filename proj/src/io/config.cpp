#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fpnet::io {
using nlohmann::json;

// --- located parsing ----------------------------------------------------------

int LocatedJson::line_of(const std::string& path) const {
  // Fall back to the closest recorded ancestor.
  std::string p = path;
  while (!p.empty()) {
    if (auto it = lines.find(p); it != lines.end()) return it->second;
    const auto cut = p.find_last_of(".[");
    if (cut == std::string::npos) break;
    p.resize(cut);
  }
  return 1;
}

void LocatedJson::fail_at(const std::string& path, const std::string& message) const {
  std::string where = source + ":" + std::to_string(line_of(path)) + ": ";
  if (!path.empty()) where += "'" + path + "': ";
  fail(ErrorCode::Config, where + message);
}

namespace {

struct Frame {
  bool object = false;
  std::string path;
  std::size_t index = 0;
  bool expect_key = true;
  std::string key;
};

std::string child_path(const Frame& f) {
  if (f.object) return f.path.empty() ? f.key : f.path + "." + f.key;
  return f.path + "[" + std::to_string(f.index) + "]";
}

// Records the line of every object key. Runs after nlohmann has accepted the
// text, so it can assume well-formed input.
std::map<std::string, int> key_lines(const std::string& text) {
  std::map<std::string, int> out;
  std::vector<Frame> stack;
  int line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '\n') {
      ++line;
    } else if (ch == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        out.emplace(child_path(stack.back()), line);
      }
    } else if (ch == '{' || ch == '[') {
      Frame f;
      f.object = ch == '{';
      f.path = stack.empty() ? std::string() : child_path(stack.back());
      stack.push_back(std::move(f));
    } else if (ch == '}' || ch == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (ch == ',' && !stack.empty()) {
      if (stack.back().object)
        stack.back().expect_key = true;
      else
        ++stack.back().index;
    }
  }
  return out;
}

}  // namespace

LocatedJson parse_located(const std::string& text, const std::string& source) {
  LocatedJson doc;
  doc.source = source;
  try {
    doc.value = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    fail(ErrorCode::Config,
         source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
  doc.lines = key_lines(text);
  return doc;
}

LocatedJson load_located(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_located(buf.str(), path.string());
}

// --- typed section reader ---------------------------------------------------

namespace {

class Section {
 public:
  Section(const LocatedJson& doc, std::string path, const json& value)
      : doc_(doc), path_(std::move(path)), value_(value) {
    if (!value_.is_object()) doc_.fail_at(path_, "expected an object");
  }

  std::string at(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }
  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    doc_.fail_at(at(key), message);
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [key, _] : value_.items()) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (known) continue;
      std::string list;
      for (const char* k : keys) list += std::string(list.empty() ? "" : ", ") + k;
      fail(key, "unknown key (allowed: " + list + ")");
    }
  }

  bool has(const char* key) const { return value_.contains(key) && !value_[key].is_null(); }
  const json& raw(const char* key) const { return value_.at(key); }

  Section child(const char* key) const { return Section(doc_, at(key), value_.at(key)); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    if (!value_[key].is_number()) fail(key, "expected a number");
    return value_[key].get<double>();
  }
  double positive(const char* key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) fail(key, "must be a positive number");
    return v;
  }
  std::uint64_t integer(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    if (!value_[key].is_number_unsigned() && !(value_[key].is_number_integer() &&
                                               value_[key].get<long long>() >= 0))
      fail(key, "expected a non-negative integer");
    return value_[key].get<std::uint64_t>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!value_[key].is_string()) fail(key, "expected a string");
    return value_[key].get<std::string>();
  }
  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!value_[key].is_boolean()) fail(key, "expected true or false");
    return value_[key].get<bool>();
  }
  std::vector<double> numbers(const char* key) const {
    const json& v = value_.at(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) doc_.fail_at(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  // Runs `parse` and re-raises its errors at `key`.
  template <class F>
  auto parsed(const char* key, F&& parse) const {
    try {
      return parse(text(key, ""));
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }

 private:
  const LocatedJson& doc_;
  std::string path_;
  const json& value_;
};

OpticsConfig read_optics(const Section& s) {
  s.allow({"lambda_um", "na", "n_high", "stride", "px_high"});
  OpticsConfig cfg;
  cfg.lambda_um = s.positive("lambda_um", cfg.lambda_um);
  cfg.na = s.positive("na", cfg.na);
  cfg.n_high = s.integer("n_high", cfg.n_high);
  cfg.stride = s.integer("stride", cfg.stride);
  cfg.px_high = s.positive("px_high", cfg.px_high);
  if (cfg.stride == 0) s.fail("stride", "must be >= 1");
  if (cfg.n_high == 0) s.fail("n_high", "must be >= 1");
  if (cfg.n_high % cfg.stride != 0)
    s.fail("stride", "n_high " + std::to_string(cfg.n_high) + " is not divisible by stride " +
                         std::to_string(cfg.stride));
  return cfg;
}

std::vector<WaveVector> read_illumination(const Section& s) {
  s.allow({"grid", "step", "allow_even", "led", "wavevectors"});
  const int forms = int(s.has("grid")) + int(s.has("led")) + int(s.has("wavevectors"));
  if (forms != 1) s.fail("", "give exactly one of 'grid', 'led' or 'wavevectors'");
  if (s.has("grid")) {
    const auto dims = s.numbers("grid");
    if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1 || dims[0] != std::floor(dims[0]) ||
        dims[1] != std::floor(dims[1]))
      s.fail("grid", "expected [rows, cols] with positive integers");
    if (!s.has("step")) s.fail("step", "required with 'grid'");
    try {
      return gen_illumination_grid(static_cast<std::size_t>(dims[0]),
                                   static_cast<std::size_t>(dims[1]), s.positive("step", 0.0),
                                   s.flag("allow_even", false));
    } catch (const Error& e) {
      s.fail("grid", e.what());
    }
  }
  if (s.has("led")) {
    const Section led = s.child("led");
    led.allow({"rows", "cols", "pitch_mm", "distance_mm"});
    if (!led.has("pitch_mm")) led.fail("pitch_mm", "required (no default LED pitch is assumed)");
    return led_wavevectors(led.integer("rows", 1), led.integer("cols", 1),
                           led.positive("pitch_mm", 0.0), led.positive("distance_mm", 0.0));
  }
  const json& list = s.raw("wavevectors");
  if (!list.is_array() || list.empty()) s.fail("wavevectors", "expected a non-empty array of [kx, ky]");
  std::vector<WaveVector> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& k = list[i];
    if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
      s.fail("wavevectors", "entry " + std::to_string(i) + " must be [kx, ky]");
    out.push_back({k[0].get<double>(), k[1].get<double>()});
  }
  return out;
}

ObjectSpec read_object(const Section& s) {
  s.allow({"amplitude_min", "phase_range", "band_limit_bins", "seed"});
  ObjectSpec o;
  o.amplitude_min = s.number("amplitude_min", o.amplitude_min);
  if (o.amplitude_min < 0.0 || o.amplitude_min > 1.0) s.fail("amplitude_min", "must lie in [0, 1]");
  if (s.has("phase_range")) {
    const auto r = s.numbers("phase_range");
    if (r.size() != 2 || !(r[1] >= r[0])) s.fail("phase_range", "expected [lo, hi] with lo <= hi");
    o.phase = {r[0], r[1]};
  }
  if (s.has("band_limit_bins")) o.band_limit_bins = s.positive("band_limit_bins", 1.0);
  o.seed = s.integer("seed", o.seed);
  return o;
}

NoiseSpec read_noise(const Section& s, std::uint64_t seed) {
  s.allow({"type", "sigma", "photons"});
  NoiseSpec n;
  n.seed = seed;
  const std::string type = s.text("type", "none");
  if (type == "none") {
    n.kind = NoiseSpec::Kind::None;
  } else if (type == "gaussian") {
    n.kind = NoiseSpec::Kind::Gaussian;
    n.sigma = s.number("sigma", 0.0);
    if (n.sigma < 0.0) s.fail("sigma", "must be >= 0");
  } else if (type == "poisson") {
    n.kind = NoiseSpec::Kind::Poisson;
    n.photons = s.positive("photons", 1000.0);
  } else {
    s.fail("type", "expected none, gaussian or poisson");
  }
  return n;
}

SimSceneSpec read_sim(const Section& s) {
  s.allow({"pattern_fraction", "orientations_deg", "phases_deg", "modulation", "test_component"});
  SimSceneSpec o;
  o.pattern_fraction = s.positive("pattern_fraction", o.pattern_fraction);
  if (s.has("orientations_deg")) {
    o.orientations_deg = s.numbers("orientations_deg");
    o.phases_deg.assign(o.orientations_deg.size(), 0.0);
  }
  if (s.has("phases_deg")) o.phases_deg = s.numbers("phases_deg");
  if (o.orientations_deg.empty() || o.orientations_deg.size() != o.phases_deg.size())
    s.fail("phases_deg", "needs one phase per orientation");
  o.modulation = s.number("modulation", o.modulation);
  if (o.modulation < 0.0 || o.modulation > 1.0) s.fail("modulation", "must lie in [0, 1]");
  if (s.has("test_component")) {
    const Section t = s.child("test_component");
    t.allow({"cutoff_multiple", "amplitude", "orientation_deg"});
    o.test_cutoff_multiple = t.positive("cutoff_multiple", 1.5);
    o.test_amplitude = t.positive("amplitude", o.test_amplitude);
    o.test_orientation_deg = t.number("orientation_deg", 0.0);
  }
  return o;
}

SpiSceneSpec read_spi(const Section& s) {
  s.allow({"patterns", "count"});
  SpiSceneSpec o;
  const std::string kind = s.text("patterns", "orthogonal");
  if (kind == "orthogonal")
    o.patterns = SpiPatternKind::Orthogonal;
  else if (kind == "random_binary")
    o.patterns = SpiPatternKind::RandomBinary;
  else
    s.fail("patterns", "expected orthogonal or random_binary");
  o.count = s.integer("count", o.count);
  if (o.count == 0) s.fail("count", "must be >= 1");
  return o;
}

LossSpec read_loss(const Section& s, const char* model_key, const char* loss_key) {
  LossSpec loss;
  loss.target = s.parsed(model_key, [](const std::string& t) { return parse_loss_target(t); });
  loss.norm = s.parsed(loss_key, [](const std::string& t) { return parse_loss_norm(t); });
  return loss;
}

OptimizerConfig read_optimizer(const Section& s) {
  s.allow({"kind", "lr", "momentum", "decay", "beta1", "beta2", "epsilon"});
  OptimizerConfig o;
  if (s.has("kind"))
    o.kind = s.parsed("kind", [](const std::string& t) { return parse_optimizer_kind(t); });
  o.lr = s.positive("lr", o.lr);
  o.momentum = s.number("momentum", o.momentum);
  o.decay = s.number("decay", o.decay);
  o.beta1 = s.number("beta1", o.beta1);
  o.beta2 = s.number("beta2", o.beta2);
  o.epsilon = s.positive("epsilon", o.epsilon);
  try {
    o.validate();
  } catch (const Error& e) {
    s.fail("", e.what());
  }
  return o;
}

ReconFileConfig read_recon(const Section& s) {
  s.allow({"model", "loss", "optimizer", "batch_size", "epochs", "order", "init", "seed",
           "deterministic", "threads", "max_updates", "checkpoint_every"});
  ReconFileConfig out;
  ReconConfig& rc = out.recon;
  if (!s.has("model")) s.fail("model", "required (intensity, exitwave, spi or sim)");
  if (!s.has("loss")) s.fail("loss", "required (l1 or l2)");
  rc.loss = read_loss(s, "model", "loss");
  if (s.has("optimizer")) rc.optimizer = read_optimizer(s.child("optimizer"));
  rc.batch_size = s.integer("batch_size", rc.batch_size);
  if (rc.batch_size == 0) s.fail("batch_size", "must be >= 1");
  rc.epochs = s.integer("epochs", rc.epochs);
  const std::string order = s.text("order", "sequential");
  if (order == "sequential")
    rc.order = BatchOrder::Sequential;
  else if (order == "shuffled")
    rc.order = BatchOrder::Shuffled;
  else
    s.fail("order", "expected sequential or shuffled");
  if (s.has("init")) {
    rc.init = s.parsed("init", [](const std::string& t) { return parse_init_kind(t); });
    if (rc.init == InitKind::Provided)
      s.fail("init", "'provided' is only available through the library interface");
  }
  rc.seed = s.integer("seed", rc.seed);
  rc.deterministic = s.flag("deterministic", rc.deterministic);
  rc.threads = static_cast<unsigned>(s.integer("threads", rc.threads));
  if (rc.threads == 0) s.fail("threads", "must be >= 1");
  rc.max_updates = s.integer("max_updates", rc.max_updates);
  out.checkpoint_every = s.integer("checkpoint_every", 0);
  return out;
}

}  // namespace

SimulateConfig simulate_config_from(const LocatedJson& doc) {
  const Section root(doc, "", doc.value);
  root.allow({"kind", "seed", "optics", "illumination", "mode", "object", "noise", "sim", "spi",
              "measurements_png"});
  SimulateConfig cfg;
  cfg.kind = root.parsed("kind", [](const std::string& t) { return parse_dataset_kind(t); });
  cfg.seed = root.integer("seed", cfg.seed);
  if (root.has("optics")) cfg.optics = read_optics(root.child("optics"));
  if (cfg.kind == DatasetKind::Fp) {
    if (!root.has("illumination")) root.fail("illumination", "required for fp datasets");
    cfg.optics.wavevectors = read_illumination(root.child("illumination"));
    try {
      cfg.optics.validate();
    } catch (const Error& e) {
      root.fail("optics", e.what());
    }
  } else if (cfg.kind == DatasetKind::Sim) {
    if (cfg.optics.stride != 1) root.fail("optics", "sim datasets need stride 1");
  }
  if (root.has("mode"))
    cfg.mode = root.parsed("mode", [](const std::string& t) { return parse_formation_mode(t); });
  if (root.has("object")) cfg.object = read_object(root.child("object"));
  cfg.noise = root.has("noise") ? read_noise(root.child("noise"), cfg.seed) : NoiseSpec{};
  cfg.noise.seed = cfg.seed;
  if (root.has("sim")) {
    if (cfg.kind != DatasetKind::Sim) root.fail("sim", "only valid with kind 'sim'");
    cfg.sim = read_sim(root.child("sim"));
  }
  if (root.has("spi")) {
    if (cfg.kind != DatasetKind::Spi) root.fail("spi", "only valid with kind 'spi'");
    cfg.spi = read_spi(root.child("spi"));
  }
  if (root.has("measurements_png")) {
    if (cfg.kind != DatasetKind::Fp) root.fail("measurements_png", "only valid with kind 'fp'");
    const json& list = root.raw("measurements_png");
    if (!list.is_array() || list.size() != cfg.optics.wavevectors.size())
      root.fail("measurements_png", "expected an array with one file per wave vector (" +
                                        std::to_string(cfg.optics.wavevectors.size()) + ")");
    const auto base = std::filesystem::path(doc.source).parent_path();
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!list[i].is_string())
        doc.fail_at("measurements_png[" + std::to_string(i) + "]", "expected a file name");
      cfg.measurement_pngs.push_back(base / list[i].get<std::string>());
    }
  }
  return cfg;
}

ReconFileConfig recon_config_at(const LocatedJson& doc, const std::string& path) {
  const json* node = &doc.value;
  if (!path.empty()) {
    if (!doc.value.contains(path)) doc.fail_at(path, "required");
    node = &doc.value.at(path);
  }
  return read_recon(Section(doc, path, *node));
}

ReconFileConfig recon_config_from(const LocatedJson& doc) { return recon_config_at(doc, ""); }

SweepConfig sweep_config_from(const LocatedJson& doc) {
  const Section root(doc, "", doc.value);
  root.allow({"base", "axes", "lr_scale"});
  SweepConfig out;
  out.base = recon_config_at(doc, "base").recon;
  out.lr_scale = root.positive("lr_scale", 1.0);
  if (!root.has("axes")) root.fail("axes", "required");
  const Section axes = root.child("axes");
  axes.allow({"lr", "optimizer", "batch_size", "loss_case", "lr_grid"});
  const auto non_empty = [&](const char* key) {
    if (!axes.raw(key).is_array() || axes.raw(key).empty())
      axes.fail(key, "sweep axis must be a non-empty array");
  };
  if (axes.has("lr")) {
    non_empty("lr");
    for (double v : axes.numbers("lr")) out.axes.lr.push_back(v * out.lr_scale);
  }
  if (axes.has("lr_grid")) {
    non_empty("lr_grid");
    for (double v : axes.numbers("lr_grid")) out.axes.lr_grid.push_back(v * out.lr_scale);
  }
  if (axes.has("optimizer")) {
    non_empty("optimizer");
    for (const auto& v : axes.raw("optimizer")) {
      if (!v.is_string()) axes.fail("optimizer", "expected optimizer names");
      try {
        out.axes.optimizer.push_back(parse_optimizer_kind(v.get<std::string>()));
      } catch (const Error& e) {
        axes.fail("optimizer", e.what());
      }
    }
  }
  if (axes.has("batch_size")) {
    non_empty("batch_size");
    for (double v : axes.numbers("batch_size")) {
      if (v < 1 || v != std::floor(v)) axes.fail("batch_size", "entries must be positive integers");
      out.axes.batch_size.push_back(static_cast<std::size_t>(v));
    }
  }
  if (axes.has("loss_case")) {
    non_empty("loss_case");
    const json& list = axes.raw("loss_case");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Section item(doc, axes.at("loss_case") + "[" + std::to_string(i) + "]", list[i]);
      item.allow({"model", "loss"});
      out.axes.loss_case.push_back(read_loss(item, "model", "loss"));
    }
  }
  try {
    out.axes.validate();
  } catch (const Error& e) {
    root.fail("axes", e.what());
  }
  for (double& lr : out.axes.lr)
    if (!(lr > 0.0)) root.fail("axes", "learning rates must be positive");
  return out;
}

}  // namespace fpnet::io
