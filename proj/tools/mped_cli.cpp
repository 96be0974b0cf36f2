#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mped/baselines.hpp"
#include "mped/cloud_io.hpp"
#include "mped/config.hpp"
#include "mped/distortion.hpp"
#include "mped/energy.hpp"
#include "mped/error.hpp"
#include "mped/gradient.hpp"
#include "mped/parallel.hpp"
#include "mped/probes.hpp"
#include "mped/report_json.hpp"
#include "mped/sweep.hpp"
#include "run_manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kParse = 2, kConfig = 3, kRuntime = 4 };

struct ConfigFlags {
  std::string preset;
  std::string variant;
  std::string psi;
  std::optional<int> p;
  std::optional<double> sigma;
  std::string color_space;
  std::optional<double> alpha;
  std::optional<double> beta_power;
  std::optional<double> center_ratio;
  std::optional<int> hf_filter_length;
  bool field_one = false;

  void attach(CLI::App& app) {
    app.add_option("--preset", preset, "sjtu-human or shapenet-machine");
    app.add_option("--variant", variant, "human or machine");
    app.add_option("--psi", psi, "neighborhood sizes, comma separated");
    app.add_option("--p", p, "Minkowski exponent (1 or 2)");
    app.add_option("--sigma", sigma, "field stabilizer");
    app.add_option("--color-space", color_space, "rgb or yuv");
    app.add_option("--alpha", alpha, "mass exponent");
    app.add_option("--beta-power", beta_power, "geometric stimulus exponent");
    app.add_option("--center-ratio", center_ratio, "human variant center ratio");
    app.add_option("--hf-filter-length", hf_filter_length, "high-pass filter neighbor count");
    app.add_flag("--field-one", field_one, "force g = 1 at every scale");
  }

  // Unset fields keep the base preset's value.
  mped::MetricConfig resolve(std::optional<mped::Variant> forced = std::nullopt) const {
    mped::MetricConfig cfg;
    std::optional<mped::Variant> v = forced;
    if (!v && !variant.empty()) v = mped::parse_variant(variant);
    if (!preset.empty()) {
      cfg = mped::preset_by_name(preset);
    } else {
      cfg = v == mped::Variant::machine ? mped::machine_preset() : mped::human_preset();
    }
    if (v) cfg.variant = *v;
    if (!psi.empty()) cfg.scales = parse_scales(psi);
    if (p) cfg.p = *p;
    if (sigma) cfg.sigma = *sigma;
    if (!color_space.empty()) {
      cfg.color_space = mped::parse_color_space(color_space);
      cfg.color_weights = mped::default_color_weights(cfg.color_space);
    }
    if (alpha) cfg.alpha = *alpha;
    if (beta_power) cfg.beta_power = *beta_power;
    if (center_ratio) cfg.center_ratio = *center_ratio;
    if (hf_filter_length) cfg.hf_filter_length = *hf_filter_length;
    if (field_one) cfg.unit_field = true;
    cfg.validate();
    return cfg;
  }

  static std::vector<int> parse_scales(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const int k = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        out.push_back(k);
      } catch (const std::exception&) {
        throw mped::ConfigError("--psi: '" + item + "' is not an integer");
      }
    }
    if (out.empty()) throw mped::ConfigError("--psi: empty list");
    std::sort(out.begin(), out.end(), std::greater<>());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

// Library argument errors raised while interpreting flags are config errors.
template <class F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const mped::ArgumentError& e) {
    throw mped::ConfigError(e.what());
  }
}

mped::PointCloud load_input(const std::string& path, mped::cli::RunManifest& manifest) {
  if (!fs::exists(path)) throw mped::ParseError(path + ": no such file");
  auto cloud = mped::load_cloud(path);
  manifest.add_input(path);
  return cloud;
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

json baselines_json(const mped::PointCloud& ref, const mped::PointCloud& dist) {
  json out = json::array();
  out.push_back(mped::to_json(mped::BaselineScore{mped::BaselineKind::cd, mped::chamfer_distance(ref, dist)}));
  if (mped::bounding_box_diagonal(ref) > 0.0) out.push_back(mped::to_json(mped::psnr_p2po(ref, dist)));
  if (ref.has_colors() && dist.has_colors()) out.push_back(mped::to_json(mped::psnr_yuv(ref, dist)));
  if (ref.size() == dist.size() && ref.size() <= 512) {
    out.push_back(mped::to_json(mped::BaselineScore{mped::BaselineKind::emd_exact, mped::emd_exact(ref, dist)}));
  }
  return out;
}

struct ScoreArgs {
  std::string ref, dist, out;
  ConfigFlags flags;
};

int cmd_score(const ScoreArgs& a, const std::vector<std::string>& argv) {
  mped::cli::RunManifest manifest("score", argv);
  const auto cfg = as_config([&] { return a.flags.resolve(); });
  manifest.set_config(cfg);
  const auto ref = load_input(a.ref, manifest);
  const auto dist = load_input(a.dist, manifest);
  json doc{{"mped", mped::to_json(mped::mped(ref, dist, cfg))}, {"baselines", baselines_json(ref, dist)}};
  if (!a.out.empty()) {
    const fs::path dir = a.out;
    fs::create_directories(dir);
    json file = doc;
    file["manifest"] = mped::cli::kManifestName;
    mped::write_file_atomic(dir / "score.json", file.dump(2) + "\n");
    manifest.add_output(dir / "score.json");
    manifest.write(dir);
  }
  emit(doc);
  return kOk;
}

struct SweepArgs {
  std::vector<std::string> kinds{"geometry_gaussian"};
  std::vector<std::string> metrics{"mped_human"};
  int levels = 5;
  std::uint64_t seed = 0;
  std::string input;
  int shape = 0;
  std::size_t points = 4000;
  std::string out;
  ConfigFlags flags;
};

std::vector<std::string> split_all(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

int cmd_sweep(const SweepArgs& a, const std::vector<std::string>& argv) {
  mped::cli::RunManifest manifest("sweep", argv);
  mped::SweepOptions base;
  std::vector<mped::DistortionKind> kinds;
  std::vector<mped::MetricId> metrics;
  as_config([&] {
    base.human_config = a.flags.resolve(mped::Variant::human);
    ConfigFlags machine_flags = a.flags;
    machine_flags.preset = a.flags.preset.empty() ? "shapenet-machine" : a.flags.preset;
    base.machine_config = machine_flags.resolve(mped::Variant::machine);
    for (const auto& k : split_all(a.kinds)) kinds.push_back(mped::parse_distortion_kind(k));
    for (const auto& m : split_all(a.metrics)) metrics.push_back(mped::parse_metric_id(m));
    if (a.levels < 3) throw mped::ConfigError("--levels must be >= 3");
    return 0;
  });
  manifest.set_config(base.human_config);
  manifest.set_extra("machine_config", mped::to_json(base.machine_config));
  manifest.set_extra("seed", a.seed);
  manifest.set_extra("levels", a.levels);

  mped::PointCloud cloud = a.input.empty() ? mped::synthetic_colored_cloud(a.shape, a.points, a.seed)
                                           : load_input(a.input, manifest);
  if (a.input.empty()) manifest.set_extra("synthetic", {{"shape", a.shape}, {"points", a.points}});

  std::vector<mped::SweepReport> reports;
  for (auto kind : kinds) {
    for (auto metric : metrics) {
      mped::SweepOptions opt = base;
      opt.kind = kind;
      opt.metric = metric;
      opt.levels = a.levels;
      opt.seed = a.seed;
      reports.push_back(mped::monotonicity_sweep(cloud, opt));
    }
  }
  json doc{{"reports", json::array()}};
  for (const auto& r : reports) doc["reports"].push_back(mped::to_json(r));
  if (!a.out.empty()) {
    const fs::path dir = a.out;
    fs::create_directories(dir);
    mped::write_file_atomic(dir / "sweep.csv", mped::sweep_csv(reports, mped::cli::kManifestName));
    json file = doc;
    file["manifest"] = mped::cli::kManifestName;
    mped::write_file_atomic(dir / "sweep.json", file.dump(2) + "\n");
    manifest.add_output(dir / "sweep.csv");
    manifest.add_output(dir / "sweep.json");
    manifest.write(dir);
  }
  emit(doc);
  return kOk;
}

struct ProbeArgs {
  std::string which = "all";
  std::string out;
};

int cmd_probe(const ProbeArgs& a, const std::vector<std::string>& argv) {
  mped::cli::RunManifest manifest("probe", argv);
  std::vector<mped::ProbeCase> cases;
  as_config([&] {
    if (a.which == "all") {
      cases = {mped::ProbeCase::d1d2, mped::ProbeCase::d3d4, mped::ProbeCase::d5d6, mped::ProbeCase::d7d8};
    } else {
      cases.push_back(mped::parse_probe_case(a.which));
    }
    return 0;
  });
  json list = json::array();
  for (auto c : cases) {
    list.push_back(mped::to_json(mped::isometric_sensitivity_probe(c)));
    manifest.set_config(mped::probe_fixture(c).config);
  }
  json doc = cases.size() == 1 ? list[0] : json{{"probes", list}};
  if (!a.out.empty()) {
    const fs::path dir = a.out;
    fs::create_directories(dir);
    json file = doc;
    file["manifest"] = mped::cli::kManifestName;
    mped::write_file_atomic(dir / "probe.json", file.dump(2) + "\n");
    manifest.add_output(dir / "probe.json");
    manifest.write(dir);
  }
  emit(doc);
  return kOk;
}

struct DescentArgs {
  std::string loss = "ped";
  std::size_t steps = 200;
  double lr = 0.01;
  std::size_t snapshot_every = 20;
  std::string ref, init;
  std::string init_mode = "offset";
  std::size_t points = 256;
  std::uint64_t seed = 0;
  std::string out;
  ConfigFlags flags;
};

// "box": uniform in the reference bounding box. "offset": uniform in a cube
// a tenth of the box size, two box lengths beyond its upper corner.
mped::PointCloud initial_cloud(const mped::PointCloud& ref, std::size_t n, const std::string& mode,
                               std::uint64_t seed) {
  mped::Vec3 lo = ref.position(0), hi = lo;
  for (const auto& q : ref.positions()) {
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], q[d]);
      hi[d] = std::max(hi[d], q[d]);
    }
  }
  if (mode == "offset") {
    using mped::operator+, mped::operator-, mped::operator*;
    const mped::Vec3 ext = hi - lo;
    lo = hi + 2.0 * ext;
    hi = lo + 0.1 * ext;
  } else if (mode != "box") {
    throw mped::ConfigError("--init-mode must be box or offset");
  }
  std::mt19937_64 rng(seed);
  std::vector<mped::Vec3> pts(n);
  for (auto& q : pts) {
    for (int d = 0; d < 3; ++d) q[d] = std::uniform_real_distribution<double>(lo[d], hi[d])(rng);
  }
  return mped::PointCloud(std::move(pts));
}

int cmd_descent(const DescentArgs& a, const std::vector<std::string>& argv) {
  mped::cli::RunManifest manifest("descent", argv);
  mped::DescentOptions opt;
  as_config([&] {
    opt.loss = mped::parse_descent_loss(a.loss);
    opt.config = a.flags.resolve(mped::Variant::machine);
    if (!(a.lr > 0.0)) throw mped::ConfigError("--lr must be positive");
    if (a.snapshot_every == 0) throw mped::ConfigError("--snapshot-every must be >= 1");
    return 0;
  });
  opt.steps = a.steps;
  opt.learning_rate = a.lr;
  opt.snapshot_every = a.snapshot_every;
  manifest.set_config(mped::descent_config(opt));
  manifest.set_extra("loss", a.loss);
  manifest.set_extra("steps", a.steps);
  manifest.set_extra("lr", a.lr);
  manifest.set_extra("seed", a.seed);
  if (a.init.empty()) manifest.set_extra("init_mode", a.init_mode);

  const mped::PointCloud x = a.ref.empty()
                                 ? initial_cloud(mped::PointCloud({{0, 0, 0}, {1, 1, 1}}), a.points, "box", a.seed)
                                 : load_input(a.ref, manifest).without_colors();
  const mped::PointCloud y0 = a.init.empty() ? initial_cloud(x, x.size(), a.init_mode, a.seed + 1)
                                             : load_input(a.init, manifest).without_colors();

  const auto traj = mped::descent_demo(x, y0, opt);
  json doc{{"loss", a.loss},
           {"steps", a.steps},
           {"initial_loss", traj.snapshots.front().loss},
           {"final_loss", traj.snapshots.back().loss},
           {"reference_spread", mped::mean_pairwise_distance(x)},
           {"initial_spread", mped::mean_pairwise_distance(y0)},
           {"final_spread", mped::mean_pairwise_distance(traj.final_cloud)},
           {"snapshots", traj.snapshots.size()}};
  if (!a.out.empty()) {
    const fs::path dir = a.out;
    const auto tj = mped::write_trajectory(dir, traj, mped::cli::kManifestName);
    mped::save_cloud(dir / "reference.ply", x, mped::CloudFormat::ply_ascii,
                     std::string("manifest ") + mped::cli::kManifestName);
    manifest.add_output(dir / "reference.ply");
    for (const auto& s : traj.snapshots) {
      char name[32];
      std::snprintf(name, sizeof(name), "step_%05zu.ply", s.step);
      manifest.add_output(dir / name);
    }
    manifest.add_output(tj);
    manifest.write(dir);
    doc["trajectory"] = tj.string();
  }
  emit(doc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  mped::parallel::configure_from_env();
  const std::vector<std::string> args(argv, argv + argc);

  CLI::App app{"Multiscale potential energy discrepancy for point clouds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MPED_VERSION);

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "score a distorted cloud against a reference");
  sc->add_option("ref", score.ref, "reference cloud")->required();
  sc->add_option("dist", score.dist, "distorted cloud")->required();
  sc->add_option("--out", score.out, "directory for score.json and the manifest");
  score.flags.attach(*sc);

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "score escalating synthetic distortions");
  sw->add_option("--kind", sweep.kinds, "distortion kind(s)");
  sw->add_option("--metric", sweep.metrics, "metric id(s)");
  sw->add_option("--levels", sweep.levels, "number of levels (>= 3)");
  sw->add_option("--seed", sweep.seed, "noise seed");
  sw->add_option("--input", sweep.input, "pristine cloud (default: synthetic)");
  sw->add_option("--shape", sweep.shape, "synthetic shape: 0 sphere, 1 torus, 2 cube shell");
  sw->add_option("--points", sweep.points, "synthetic point count");
  sw->add_option("--out", sweep.out, "directory for sweep.csv, sweep.json and the manifest");
  sweep.flags.attach(*sw);

  ProbeArgs probe;
  auto* pr = app.add_subcommand("probe", "run the built-in sensitivity probes");
  pr->add_option("--case", probe.which, "d1d2, d3d4, d5d6, d7d8 or all");
  pr->add_option("--out", probe.out, "directory for probe.json and the manifest");

  DescentArgs descent;
  auto* de = app.add_subcommand("descent", "gradient descent of a cloud toward a reference");
  de->add_option("--loss", descent.loss, "cd, cd_x2y, cd_y2x, ped, ped_x2y, ped_y2x");
  de->add_option("--steps", descent.steps, "iterations");
  de->add_option("--lr", descent.lr, "learning rate");
  de->add_option("--snapshot-every", descent.snapshot_every, "snapshot interval");
  de->add_option("--ref", descent.ref, "reference cloud (default: uniform in the unit cube)");
  de->add_option("--init", descent.init, "initial cloud (default: generated by --init-mode)");
  de->add_option("--init-mode", descent.init_mode, "offset or box");
  de->add_option("--points", descent.points, "synthetic reference size");
  de->add_option("--seed", descent.seed, "seed for synthetic inputs");
  de->add_option("--out", descent.out, "directory for snapshots, trajectory.json and the manifest");
  descent.flags.attach(*de);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "mped: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (sc->parsed()) return cmd_score(score, args);
    if (sw->parsed()) return cmd_sweep(sweep, args);
    if (pr->parsed()) return cmd_probe(probe, args);
    if (de->parsed()) return cmd_descent(descent, args);
  } catch (const mped::ParseError& e) {
    std::cerr << "mped: " << e.what() << "\n";
    return kParse;
  } catch (const mped::ConfigError& e) {
    std::cerr << "mped: config: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "mped: " << e.what() << "\n";
    return kRuntime;
  }
  std::cerr << app.help();
  return kUsage;
}
