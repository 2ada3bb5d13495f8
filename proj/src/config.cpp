#include "leolink/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "leolink/errors.hpp"
#include "leolink/types.hpp"

namespace leolink {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long l = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(l);
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ConfigError("bad seed value for " + key + ": '" + v + "'");
  }
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  for (const auto& tok : split_csv(v)) out.push_back(parse_double(key, tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& tok : split_csv(v)) out.push_back(parse_int(key, tok));
  return out;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace

void SystemConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid config: ") + what);
  };
  require(carrier_hz > 0, "carrier_hz must be positive");
  require(bandwidth_hz > 0, "bandwidth_hz must be positive");
  require(subcarrier_spacing_hz > 0, "subcarrier_spacing_hz must be positive");
  require(n_subcarriers >= 1, "n_subcarriers must be >= 1");
  require(n_users >= 1, "n_users must be >= 1");
  require(array_x >= 1 && array_y >= 1, "array dimensions must be >= 1");
  require(altitude_m > 0, "altitude_m must be positive");
  require(max_sat_doppler_hz > 0, "max_sat_doppler_hz must be positive");
  require(min_elevation_deg > 0 && min_elevation_deg < 90,
          "min_elevation_deg must be in (0, 90)");
  // Zero delay spread / user Doppler are valid (static-channel limit).
  require(delay_spread_s >= 0, "delay_spread_s must be non-negative");
  require(max_user_doppler_hz >= 0, "max_user_doppler_hz must be non-negative");
  require(max_paths >= 1, "max_paths must be >= 1");
  require(n_pilots >= 1, "n_pilots must be >= 1");
  require(n_data >= 1, "n_data must be >= 1");
  require(n_cp >= 0, "n_cp must be >= 0");
  require(rician_kappa > 0, "rician_kappa must be positive");
  require(n_em >= 1, "n_em must be >= 1");
  require(bem_order >= 1, "bem_order must be >= 1");
  require(bem_order <= n_data, "bem_order must not exceed n_data");
  require(std::abs(subcarrier_index) <= n_subcarriers / 2,
          "subcarrier_index outside the band");
  require(trials >= 1, "trials must be >= 1");
  require(n_threads >= 0, "n_threads must be >= 0");
  require(std::isfinite(snr_db), "snr_db must be finite");
}

void apply_override(SystemConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "carrier_hz") cfg.carrier_hz = parse_double(key, value);
  else if (key == "bandwidth_hz") cfg.bandwidth_hz = parse_double(key, value);
  else if (key == "subcarrier_spacing_hz")
    cfg.subcarrier_spacing_hz = parse_double(key, value);
  else if (key == "n_subcarriers") cfg.n_subcarriers = parse_int(key, value);
  else if (key == "n_users") cfg.n_users = parse_int(key, value);
  else if (key == "array_x") cfg.array_x = parse_int(key, value);
  else if (key == "array_y") cfg.array_y = parse_int(key, value);
  else if (key == "altitude_m") cfg.altitude_m = parse_double(key, value);
  else if (key == "max_sat_doppler_hz")
    cfg.max_sat_doppler_hz = parse_double(key, value);
  else if (key == "min_elevation_deg")
    cfg.min_elevation_deg = parse_double(key, value);
  else if (key == "delay_spread_s")
    cfg.delay_spread_s = parse_double(key, value);
  else if (key == "max_user_doppler_hz")
    cfg.max_user_doppler_hz = parse_double(key, value);
  else if (key == "max_paths") cfg.max_paths = parse_int(key, value);
  else if (key == "n_pilots") cfg.n_pilots = parse_int(key, value);
  else if (key == "n_data") cfg.n_data = parse_int(key, value);
  else if (key == "constellation")
    cfg.constellation = constellation_from_string(value);
  else if (key == "n_cp") cfg.n_cp = parse_int(key, value);
  else if (key == "rician_kappa") cfg.rician_kappa = parse_double(key, value);
  else if (key == "n_em") cfg.n_em = parse_int(key, value);
  else if (key == "bem_order") cfg.bem_order = parse_int(key, value);
  else if (key == "subcarrier_index")
    cfg.subcarrier_index = parse_int(key, value);
  else if (key == "snr_db") cfg.snr_db = parse_double(key, value);
  else if (key == "trials") cfg.trials = parse_int(key, value);
  else if (key == "base_seed") cfg.base_seed = parse_u64(key, value);
  else if (key == "n_threads") cfg.n_threads = parse_int(key, value);
  else if (key == "snr_grid") cfg.snr_grid = parse_double_list(key, value);
  else if (key == "iter_grid") cfg.iter_grid = parse_int_list(key, value);
  else if (key == "snr_list") cfg.snr_list = parse_double_list(key, value);
  else if (key == "d_grid") cfg.d_grid = parse_int_list(key, value);
  else if (key == "methods") cfg.methods = split_csv(value);
  else
    throw ConfigError("unknown config key: " + key);
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  SystemConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string format_config(const SystemConfig& c) {
  std::ostringstream o;
  o << "# leolink configuration (units in key names: hz, m, s, deg, db)\n";
  o << "carrier_hz = " << fmt_g(c.carrier_hz) << "\n";
  o << "bandwidth_hz = " << fmt_g(c.bandwidth_hz) << "\n";
  o << "subcarrier_spacing_hz = " << fmt_g(c.subcarrier_spacing_hz) << "\n";
  o << "n_subcarriers = " << c.n_subcarriers << "\n";
  o << "n_users = " << c.n_users << "\n";
  o << "array_x = " << c.array_x << "\n";
  o << "array_y = " << c.array_y << "\n";
  o << "altitude_m = " << fmt_g(c.altitude_m) << "\n";
  o << "max_sat_doppler_hz = " << fmt_g(c.max_sat_doppler_hz) << "\n";
  o << "min_elevation_deg = " << fmt_g(c.min_elevation_deg) << "\n";
  o << "delay_spread_s = " << fmt_g(c.delay_spread_s) << "\n";
  o << "max_user_doppler_hz = " << fmt_g(c.max_user_doppler_hz) << "\n";
  o << "max_paths = " << c.max_paths << "\n";
  o << "n_pilots = " << c.n_pilots << "\n";
  o << "n_data = " << c.n_data << "\n";
  o << "constellation = " << to_string(c.constellation) << "\n";
  o << "n_cp = " << c.n_cp << "\n";
  o << "rician_kappa = " << fmt_g(c.rician_kappa) << "\n";
  o << "n_em = " << c.n_em << "\n";
  o << "bem_order = " << c.bem_order << "\n";
  o << "subcarrier_index = " << c.subcarrier_index << "\n";
  o << "snr_db = " << fmt_g(c.snr_db) << "\n";
  o << "trials = " << c.trials << "\n";
  o << "base_seed = " << c.base_seed << "\n";
  o << "n_threads = " << c.n_threads << "\n";
  o << "snr_grid = " << join(c.snr_grid, fmt_g) << "\n";
  o << "iter_grid = "
    << join(c.iter_grid, [](int v) { return std::to_string(v); }) << "\n";
  o << "snr_list = " << join(c.snr_list, fmt_g) << "\n";
  o << "d_grid = " << join(c.d_grid, [](int v) { return std::to_string(v); })
    << "\n";
  o << "methods = " << join(c.methods, [](const std::string& s) { return s; })
    << "\n";
  return o.str();
}

double path_loss_db(double distance_m, double carrier_hz) {
  return 20.0 * std::log10(4.0 * kPi * distance_m * carrier_hz /
                           kSpeedOfLight);
}

}  // namespace leolink
