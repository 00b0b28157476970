#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "radar_odom/bench.hpp"
#include "radar_odom/error.hpp"
#include "radar_odom/icp.hpp"
#include "radar_odom/io.hpp"
#include "radar_odom/keypoints.hpp"
#include "radar_odom/odometry.hpp"
#include "radar_odom/simulator.hpp"

namespace radar_odom::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Values given on the command line; each one overrides the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<int> workers;
  std::optional<int> l_max;
  std::optional<std::string> prior;
  bool svg = false;
};

RunConfig load_config(const Overrides& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = parse_config(read_text_file(o.config_path));
  if (o.seed) cfg.seed = *o.seed;
  if (o.method) cfg.method = *o.method;
  if (o.workers) cfg.workers = *o.workers;
  if (o.l_max) cfg.pipeline.l_max = *o.l_max;
  if (o.prior) cfg = parse_config("pipeline.prior = " + *o.prior, cfg);
  if (o.svg) cfg.svg = true;
  cfg.validate();
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw_error(ErrorCode::kIo, "cannot create output directory " + dir.string());
}

std::string scan_name(std::size_t k) {
  std::ostringstream name;
  name << "scan_" << std::setw(5) << std::setfill('0') << k << ".bin";
  return name.str();
}

std::vector<PolarScan> read_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw_error(ErrorCode::kIo, "dataset directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("scan_") && entry.path().extension() == ".bin") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw_error(ErrorCode::kIo, "no scan_*.bin files in " + dir.string());
  std::vector<PolarScan> scans;
  for (const fs::path& f : files) scans.push_back(read_scan_file(f));
  return scans;
}

std::optional<TrajectorySpec> read_truth(const fs::path& dataset) {
  const fs::path path = dataset / "truth.csv";
  if (!fs::exists(path)) return std::nullopt;
  std::istringstream in(read_text_file(path));
  return read_trajectory_csv(in);
}

template <typename Writer>
void write_table(const fs::path& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  write_text_file(path, out.str());
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& input, const RunConfig& cfg,
                    const KeyValues& timing) {
  KeyValues values = {{"manifest.command", command},
                      {"manifest.input", input},
                      {"manifest.output", dir.string()},
                      {"manifest.version", std::string(kVersion)}};
  for (auto& kv : config_key_values(cfg)) values.push_back(std::move(kv));
  for (const auto& [stage, seconds] : timing) values.emplace_back("timing." + stage, seconds);
  write_text_file(dir / "manifest.txt", "# rerun: radar_odom " + command + (input.empty() ? "" : " " + input) +
                                            " --config " + (dir / "manifest.txt").string() + " --out " +
                                            dir.string() + "\n" + to_text(values));
}

std::string svg_polyline(std::span<const StampedPose> poses, double scale, double min_x, double max_y, double pad,
                         const char* colour) {
  std::ostringstream out;
  out << "  <polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
  for (const StampedPose& p : poses) {
    out << format_double(pad + (p.pose.x - min_x) * scale) << ',' << format_double(pad + (max_y - p.pose.y) * scale)
        << ' ';
  }
  out << "\"/>\n";
  return out.str();
}

// Estimated (blue) and true (grey) trajectories, equal axis scaling.
std::string trajectory_svg(std::span<const StampedPose> estimate, const std::optional<TrajectorySpec>& truth) {
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  const auto extend = [&](std::span<const StampedPose> poses) {
    for (const StampedPose& p : poses) {
      min_x = std::min(min_x, p.pose.x);
      max_x = std::max(max_x, p.pose.x);
      min_y = std::min(min_y, p.pose.y);
      max_y = std::max(max_y, p.pose.y);
    }
  };
  extend(estimate);
  if (truth) extend(truth->poses);
  constexpr double kSize = 600.0;
  constexpr double kPad = 20.0;
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-6});
  const double scale = (kSize - 2 * kPad) / span;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize << "\">\n";
  if (truth) out << svg_polyline(truth->poses, scale, min_x, max_y, kPad, "#999999");
  out << svg_polyline(estimate, scale, min_x, max_y, kPad, "#1f5fbf");
  out << "</svg>\n";
  return out.str();
}

int cmd_simulate(const Overrides& o, const fs::path& out_dir, std::ostream& out) {
  const RunConfig cfg = load_config(o);
  const auto start = Clock::now();
  const TrajectoryConfig& t = cfg.trajectory;
  const TrajectorySpec truth = make_trajectory(t.kind, t.steps, t.speed, t.yaw_rate, t.dt, cfg.seed);
  const std::vector<Landmark> world = scatter_landmarks(cfg.world.landmarks, cfg.world.field, cfg.seed);
  const std::vector<PolarScan> scans = render_sequence(world, truth, cfg.sensor, cfg.artifacts, cfg.seed);
  const double render_seconds = seconds_since(start);

  ensure_dir(out_dir);
  for (std::size_t k = 0; k < scans.size(); ++k) write_scan_file(scans[k], out_dir / scan_name(k));
  write_table(out_dir / "truth.csv", [&](std::ostream& s) { write_trajectory_csv(truth.poses, s); });
  write_table(out_dir / "landmarks.csv", [&](std::ostream& s) { write_landmarks_csv(world, s); });
  write_manifest(out_dir, "simulate", "", cfg, {{"render_s", format_double(render_seconds)}});
  out << "wrote " << scans.size() << " scans to " << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_extract(const Overrides& o, const fs::path& dataset, const fs::path& out_dir, std::ostream& out) {
  const RunConfig cfg = load_config(o);
  const std::vector<PolarScan> scans = read_dataset(dataset);
  ensure_dir(out_dir);
  const auto start = Clock::now();
  std::size_t total = 0;
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const KeypointSet set = extract_keypoints(scans[k], cfg.pipeline.l_max);
    total += set.size();
    std::string name = scan_name(k);
    name.replace(0, 4, "keypoints");
    name.replace(name.size() - 4, 4, ".csv");
    write_table(out_dir / name, [&](std::ostream& s) { write_keypoints_csv(set, s); });
  }
  write_manifest(out_dir, "extract", dataset.string(), cfg, {{"extract_s", format_double(seconds_since(start))}});
  out << "extracted " << total << " keypoints from " << scans.size() << " scans\n";
  return kExitOk;
}

int cmd_odometry(const Overrides& o, const fs::path& dataset, const fs::path& out_dir, std::ostream& out) {
  const RunConfig cfg = load_config(o);
  const std::vector<PolarScan> scans = read_dataset(dataset);
  const std::optional<TrajectorySpec> truth = read_truth(dataset);
  if (scans.size() < 2) throw_error(ErrorCode::kIo, "odometry needs at least 2 scans in " + dataset.string());

  const auto start = Clock::now();
  OdometryResult result;
  if (cfg.method == "ro") {
    result = run_odometry(std::span<const PolarScan>(scans), cfg.pipeline, cfg.workers);
  } else {
    std::vector<KeypointSet> sets;
    for (const PolarScan& scan : scans) sets.push_back(extract_keypoints(scan, cfg.pipeline.l_max));
    result = run_icp_odometry(std::span<const KeypointSet>(sets), cfg.icp);
  }
  const double run_seconds = seconds_since(start);

  ensure_dir(out_dir);
  write_table(out_dir / "relative.csv", [&](std::ostream& s) { write_relative_csv(result.relative_poses, s); });
  write_table(out_dir / "trajectory.csv", [&](std::ostream& s) { write_trajectory_csv(result.trajectory, s); });
  if (truth) {
    const KeyValues metrics = metrics_to_key_values(evaluate(result, *truth), cfg.method);
    write_table(out_dir / "metrics.txt", [&](std::ostream& s) { write_key_values(metrics, s); });
    write_key_values(metrics, out);
  }
  if (cfg.svg) write_text_file(out_dir / "trajectory.svg", trajectory_svg(result.trajectory, truth));
  write_manifest(out_dir, "odometry", dataset.string(), cfg, {{"odometry_s", format_double(run_seconds)}});

  const bool all_failed = std::all_of(result.relative_poses.begin(), result.relative_poses.end(),
                                      [](const RelativePose& p) { return p.diagnostics.failed; });
  if (all_failed) throw_error(ErrorCode::kMatchFailure, "every scan pair failed to match");
  return kExitOk;
}

int cmd_eval(const Overrides& o, const fs::path& run_dir, const fs::path& dataset, const fs::path& out_dir,
             std::ostream& out) {
  RunConfig cfg = load_config(o);
  if (!o.method && fs::exists(run_dir / "manifest.txt")) {
    cfg.method = parse_config(read_text_file(run_dir / "manifest.txt")).method;
  }
  std::optional<TrajectorySpec> truth = read_truth(dataset);
  if (!truth) throw_error(ErrorCode::kIo, "no truth.csv in " + dataset.string());
  std::istringstream rel(read_text_file(run_dir / "relative.csv"));
  OdometryResult result;
  result.method = cfg.method;
  result.relative_poses = read_relative_csv(rel);
  result.trajectory = accumulate(result.relative_poses);
  const KeyValues metrics = metrics_to_key_values(evaluate(result, *truth), cfg.method);
  const fs::path target = out_dir.empty() ? run_dir : out_dir;
  ensure_dir(target);
  write_table(target / "metrics.txt", [&](std::ostream& s) { write_key_values(metrics, s); });
  write_key_values(metrics, out);
  return kExitOk;
}

int cmd_bench(const Overrides& o, const fs::path& out_dir, std::ostream& out) {
  RunConfig cfg = load_config(o);
  cfg.bench.seed = cfg.seed;
  const auto start = Clock::now();
  const BenchReport report = run_complexity_bench(cfg.bench);
  const double bench_seconds = seconds_since(start);

  ensure_dir(out_dir);
  write_table(out_dir / "bench_association.csv", [&](std::ostream& s) {
    s << "l_max,keypoints_a,keypoints_b,candidates,matches,seconds_extract,seconds_associate,seconds_motion\n";
    for (const AssociationTiming& r : report.association) {
      s << r.l_max << ',' << r.keypoints_a << ',' << r.keypoints_b << ',' << r.candidates << ',' << r.matches << ','
        << format_double(r.seconds_extract) << ',' << format_double(r.seconds_associate) << ','
        << format_double(r.seconds_motion) << '\n';
    }
  });
  write_table(out_dir / "bench_extraction.csv", [&](std::ostream& s) {
    s << "azimuths,range_bins,keypoints,seconds\n";
    for (const ExtractionTiming& r : report.extraction) {
      s << r.azimuths << ',' << r.range_bins << ',' << r.keypoints << ',' << format_double(r.seconds) << '\n';
    }
  });
  const KeyValues slopes = {{"association_slope", format_double(report.association_slope)},
                            {"extraction_slope", format_double(report.extraction_slope)}};
  write_table(out_dir / "bench.txt", [&](std::ostream& s) { write_key_values(slopes, s); });
  write_manifest(out_dir, "bench", "", cfg, {{"bench_s", format_double(bench_seconds)}});
  write_key_values(slopes, out);
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kExitConfig;
    case ErrorCode::kIo:
    case ErrorCode::kTimestampMismatch:
      return kExitIo;
    case ErrorCode::kMatchFailure:
      return kExitMatchFailure;
    default:
      return kExitInternal;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radar odometry from synthetic FMCW scans", "radar_odom"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Overrides o;
  std::string out_dir;
  std::string dataset;
  std::string run_dir;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", out_dir, "output directory")->required();
  };
  const auto pipeline_flags = [&](CLI::App* sub) {
    sub->add_option("--l-max", o.l_max, "maximum number of keypoint regions per scan");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "render a scan sequence and its ground truth");
  common(simulate);

  CLI::App* extract = app.add_subcommand("extract", "extract keypoints from every scan of a dataset");
  extract->add_option("dataset", dataset, "dataset directory")->required();
  common(extract);
  pipeline_flags(extract);

  CLI::App* odometry = app.add_subcommand("odometry", "estimate scan-to-scan motion over a dataset");
  odometry->add_option("dataset", dataset, "dataset directory")->required();
  common(odometry);
  pipeline_flags(odometry);
  odometry->add_option("--method", o.method, "ro or icp")->check(CLI::IsMember({"ro", "icp"}));
  odometry->add_option("--workers", o.workers, "parallel scan pairs (prior = none only)");
  odometry->add_option("--prior", o.prior, "none or max_accel")->check(CLI::IsMember({"none", "max_accel"}));
  odometry->add_flag("--svg", o.svg, "also write trajectory.svg");

  CLI::App* eval = app.add_subcommand("eval", "compare an odometry run with the dataset's ground truth");
  eval->add_option("run", run_dir, "odometry output directory")->required();
  eval->add_option("dataset", dataset, "dataset directory")->required();
  eval->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
  eval->add_option("--method", o.method, "label for the metrics");
  eval->add_option("--out", out_dir, "output directory (default: the run directory)");

  CLI::App* bench = app.add_subcommand("bench", "time data association and extraction on a fixed scene");
  common(bench);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out_dir, out);
    if (extract->parsed()) return cmd_extract(o, dataset, out_dir, out);
    if (odometry->parsed()) return cmd_odometry(o, dataset, out_dir, out);
    if (eval->parsed()) return cmd_eval(o, run_dir, dataset, out_dir, out);
    if (bench->parsed()) return cmd_bench(o, out_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace radar_odom::cli
