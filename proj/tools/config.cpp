#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>
#include <sstream>
#include <system_error>
#include <type_traits>

#include "radar_odom/error.hpp"

namespace radar_odom::cli {
namespace {

std::string trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return std::string(text.substr(begin, end - begin + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw_error(ErrorCode::kConfig, "bad value for " + key + ": '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw_error(ErrorCode::kConfig, "bad boolean for " + key + ": '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  return parts;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

std::string prior_name(MotionPrior::Kind kind) { return kind == MotionPrior::Kind::kNone ? "none" : "max_accel"; }

// Message of a library error without its "<code>: " prefix.
std::string bare_message(const Error& e) {
  std::string message = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (message.starts_with(prefix)) message.erase(0, prefix.size());
  return message;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T, typename Access>
Field number_field(std::string key, Access access) {
  return {key,
          [key, access](RunConfig& c, const std::string& v) { access(c) = parse_number<T>(key, v); },
          [access](const RunConfig& c) {
            const T value = access(c);
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(value);
            } else {
              return std::to_string(value);
            }
          }};
}

#define RO_DOUBLE(key, member) number_field<double>(key, [](auto& c) -> auto& { return c.member; })
#define RO_INT(key, member) number_field<int>(key, [](auto& c) -> auto& { return c.member; })

// One entry per key, in snapshot order.
const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      number_field<std::uint64_t>("seed", [](auto& c) -> auto& { return c.seed; }),
      RO_INT("sensor.azimuths", sensor.num_azimuths),
      RO_INT("sensor.range_bins", sensor.num_range_bins),
      RO_DOUBLE("sensor.range_resolution", sensor.range_resolution),
      RO_DOUBLE("sensor.scan_period", sensor.scan_period),
      RO_DOUBLE("artifacts.speckle_scale", artifacts.speckle_scale),
      RO_DOUBLE("artifacts.background_noise", artifacts.background_noise),
      RO_DOUBLE("artifacts.false_positive_rate", artifacts.false_positive_rate),
      RO_DOUBLE("artifacts.false_positive_reflectivity", artifacts.false_positive_reflectivity),
      RO_DOUBLE("artifacts.dropout_prob", artifacts.dropout_prob),
      RO_DOUBLE("artifacts.beam_width_azimuths", artifacts.beam_width_azimuths),
      RO_DOUBLE("artifacts.range_spread_bins", artifacts.range_spread_bins),
      {"trajectory.kind",
       [](RunConfig& c, const std::string& v) {
         try {
           c.trajectory.kind = parse_trajectory_kind(v);
         } catch (const Error& e) {
           throw_error(ErrorCode::kConfig, bare_message(e));
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.trajectory.kind)); }},
      RO_INT("trajectory.steps", trajectory.steps),
      RO_DOUBLE("trajectory.speed", trajectory.speed),
      RO_DOUBLE("trajectory.yaw_rate", trajectory.yaw_rate),
      RO_DOUBLE("trajectory.dt", trajectory.dt),
      RO_INT("world.landmarks", world.landmarks),
      RO_DOUBLE("world.center_x", world.field.center.x),
      RO_DOUBLE("world.center_y", world.field.center.y),
      RO_DOUBLE("world.min_radius", world.field.min_radius),
      RO_DOUBLE("world.max_radius", world.field.max_radius),
      RO_DOUBLE("world.min_separation", world.field.min_separation),
      RO_DOUBLE("world.min_reflectivity", world.field.min_reflectivity),
      RO_DOUBLE("world.max_reflectivity", world.field.max_reflectivity),
      {"pipeline.method", [](RunConfig& c, const std::string& v) { c.method = v; },
       [](const RunConfig& c) { return c.method; }},
      RO_INT("pipeline.workers", workers),
      RO_INT("pipeline.l_max", pipeline.l_max),
      RO_INT("pipeline.alpha", pipeline.alpha),
      RO_INT("pipeline.rho", pipeline.rho),
      RO_DOUBLE("pipeline.sigma_c", pipeline.sigma_c),
      {"pipeline.prior",
       [](RunConfig& c, const std::string& v) {
         if (v == "none") {
           c.pipeline.prior.kind = MotionPrior::Kind::kNone;
         } else if (v == "max_accel") {
           c.pipeline.prior.kind = MotionPrior::Kind::kMaxAccel;
         } else {
           throw_error(ErrorCode::kConfig, "pipeline.prior must be none or max_accel, got '" + v + "'");
         }
       },
       [](const RunConfig& c) { return prior_name(c.pipeline.prior.kind); }},
      RO_DOUBLE("pipeline.max_accel", pipeline.prior.max_accel),
      RO_DOUBLE("pipeline.gate_margin", pipeline.gate_margin),
      RO_DOUBLE("icp.nn_radius", icp.nn_radius),
      RO_DOUBLE("icp.convergence_tol", icp.convergence_tol),
      RO_INT("icp.max_iterations", icp.max_iterations),
      {"bench.l_max_sweep",
       [](RunConfig& c, const std::string& v) {
         c.bench.l_max_sweep.clear();
         for (const std::string& part : split(v, ',')) c.bench.l_max_sweep.push_back(parse_number<int>("bench.l_max_sweep", part));
       },
       [](const RunConfig& c) { return join_ints(c.bench.l_max_sweep); }},
      {"bench.grid_sweep",
       [](RunConfig& c, const std::string& v) {
         c.bench.grid_sweep.clear();
         for (const std::string& part : split(v, ',')) {
           const auto dims = split(part, 'x');
           if (dims.size() != 2) throw_error(ErrorCode::kConfig, "bench.grid_sweep entries look like 100x200");
           c.bench.grid_sweep.emplace_back(parse_number<int>("bench.grid_sweep", dims[0]),
                                           parse_number<int>("bench.grid_sweep", dims[1]));
         }
       },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.bench.grid_sweep.size(); ++i) {
           out += (i ? "," : "") + std::to_string(c.bench.grid_sweep[i].first) + "x" +
                  std::to_string(c.bench.grid_sweep[i].second);
         }
         return out;
       }},
      RO_INT("bench.extraction_l_max", bench.extraction_l_max),
      RO_INT("bench.repeats", bench.repeats),
      {"output.svg", [](RunConfig& c, const std::string& v) { c.svg = parse_bool("output.svg", v); },
       [](const RunConfig& c) { return std::string(c.svg ? "true" : "false"); }},
  };
  return table;
}

#undef RO_DOUBLE
#undef RO_INT

void as_config_error(const std::function<void()>& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw_error(ErrorCode::kConfig, bare_message(e));
  }
}

}  // namespace

void RunConfig::validate() const {
  as_config_error([this] {
    sensor.validate();
    artifacts.validate();
    pipeline.validate();
    icp.validate();
    bench.validate();
  });
  if (method != "ro" && method != "icp") throw_error(ErrorCode::kConfig, "method must be ro or icp, got '" + method + "'");
  if (workers < 1) throw_error(ErrorCode::kConfig, "workers must be >= 1");
  if (trajectory.steps < 1) throw_error(ErrorCode::kConfig, "trajectory.steps must be >= 1");
  if (!(trajectory.dt > 0.0)) throw_error(ErrorCode::kConfig, "trajectory.dt must be positive");
  if (!(trajectory.speed >= 0.0)) throw_error(ErrorCode::kConfig, "trajectory.speed must be >= 0");
  if (world.landmarks < 0) throw_error(ErrorCode::kConfig, "world.landmarks must be >= 0");
  const LandmarkField& f = world.field;
  if (!(f.min_radius >= 0.0 && f.max_radius > f.min_radius)) {
    throw_error(ErrorCode::kConfig, "world radii must satisfy 0 <= min_radius < max_radius");
  }
  if (!(f.min_separation >= 0.0)) throw_error(ErrorCode::kConfig, "world.min_separation must be >= 0");
  if (!(f.min_reflectivity > 0.0 && f.max_reflectivity >= f.min_reflectivity)) {
    throw_error(ErrorCode::kConfig, "world reflectivities must satisfy 0 < min <= max");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_number) + ": ";
    if (eq == std::string::npos) throw_error(ErrorCode::kConfig, where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.starts_with("manifest.") || key.starts_with("timing.")) continue;
    if (!seen.insert(key).second) throw_error(ErrorCode::kConfig, where + "duplicate key " + key);
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw_error(ErrorCode::kConfig, where + "unknown key " + key);
    try {
      it->set(base, value);
    } catch (const Error& e) {
      throw_error(ErrorCode::kConfig, where + bare_message(e));
    }
  }
  return base;
}

KeyValues config_key_values(const RunConfig& cfg) {
  KeyValues out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

std::string to_text(const KeyValues& values) {
  std::ostringstream out;
  write_key_values(values, out);
  return out.str();
}

}  // namespace radar_odom::cli
