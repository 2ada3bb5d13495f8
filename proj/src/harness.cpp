#include "leolink/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "leolink/channel.hpp"
#include "leolink/dlp_basis.hpp"
#include "leolink/errors.hpp"
#include "leolink/estimators.hpp"
#include "leolink/frame.hpp"
#include "leolink/rng.hpp"

namespace leolink {

namespace {

constexpr int kGeometryRetries = 3;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Shared immutable basis cache, one entry per (length, order).
const BasisMatrix& cached_basis(int length, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, BasisMatrix> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.try_emplace({length, order});
  if (inserted) it->second = build_basis(length, order);
  return it->second;
}

struct TrialContext {
  std::vector<UserChannelState> states;
  ArrayResponseMatrix array;
  EffectiveChannelMatrix effective;
  SymbolMatrix symbols;
  FrameObservation obs;
  CMatrix ref_data;  // effective channel over the data columns
};

TrialContext build_context(const SystemConfig& config,
                           std::uint64_t trial_seed) {
  TrialContext ctx;
  ctx.states =
      sample_user_states(config, derive_seed(trial_seed, kStreamStates));
  std::vector<UserGeometry> geometries;
  geometries.reserve(ctx.states.size());
  for (const auto& st : ctx.states) geometries.push_back(st.geometry);
  ctx.array = upa_response({config.array_x, config.array_y}, geometries);
  ctx.effective =
      effective_channel(ctx.states, config, config.subcarrier_index);
  ctx.symbols =
      build_symbol_matrix(config, derive_seed(trial_seed, kStreamSymbols));
  ctx.obs = synthesize_observation(ctx.effective, ctx.symbols, ctx.array,
                                   config.snr_db,
                                   derive_seed(trial_seed, kStreamNoise));
  ctx.ref_data = ctx.effective.g.rightCols(config.n_data);
  return ctx;
}

TrialContext build_context_with_retry(const SystemConfig& config,
                                      std::uint64_t trial_seed) {
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t seed =
        attempt == 0 ? trial_seed
                     : derive_seed(trial_seed, 0xA110C8ED ^ attempt);
    try {
      return build_context(config, seed);
    } catch (const GeometryError&) {
      if (attempt >= kGeometryRetries) throw;
    }
  }
}

TrialMetrics score(const SystemConfig& config, const TrialContext& ctx,
                   const ChannelEstimate& est) {
  TrialMetrics m;
  m.method = est.method;
  m.snr_db = config.snr_db;
  m.n_em = est.iterations_used;
  m.d_order = est.method == Method::kEm ? config.bem_order : 0;
  m.nmse = nmse(ctx.ref_data, est.h_hat);
  m.ser = equalize_detect(ctx.obs, est, ctx.symbols).ser;
  return m;
}

ChannelEstimate estimate_for(const SystemConfig& config,
                             const TrialContext& ctx, Method method) {
  switch (method) {
    case Method::kPb:
      return pb_genie_estimate(ctx.effective, config.n_pilots);
    case Method::kPls:
      return pls_initial_estimate(ctx.obs, ctx.symbols);
    case Method::kEm: {
      const auto init = pls_initial_estimate(ctx.obs, ctx.symbols);
      const auto& basis = cached_basis(config.n_data, config.bem_order);
      return em_estimate(ctx.obs, init, basis,
                         make_hypotheses(config.constellation), config.n_em);
    }
  }
  throw ConfigError("unknown method");
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(method_from_string(n));
  if (out.empty()) throw ConfigError("no methods selected");
  return out;
}

int resolve_threads(const SystemConfig& config) {
  if (config.n_threads > 0) return config.n_threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(trial_index) for every index with a fixed-size worker pool.
// Results must be written into per-index slots so the worker count never
// affects the outcome.
void parallel_for_trials(int n_trials, int n_threads,
                         const std::function<void(int)>& body) {
  if (n_threads <= 1 || n_trials <= 1) {
    for (int i = 0; i < n_trials; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_trials || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(n_threads, n_trials);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ci_half_width(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  const double sd = std::sqrt(acc / (static_cast<double>(v.size()) - 1.0));
  return 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
}

MethodAggregate aggregate(const std::string& label,
                          const std::vector<double>& nmse_vals,
                          const std::vector<double>& ser_vals) {
  MethodAggregate agg;
  agg.method = label;
  agg.mean_nmse = mean_of(nmse_vals);
  agg.mean_ser = mean_of(ser_vals);
  agg.ci_nmse = ci_half_width(nmse_vals, agg.mean_nmse);
  agg.ci_ser = ci_half_width(ser_vals, agg.mean_ser);
  agg.median_nmse = median_of(nmse_vals);
  agg.median_ser = median_of(ser_vals);
  return agg;
}

}  // namespace

const TrialMetrics& TrialResult::of(Method m) const {
  for (const auto& tm : metrics)
    if (tm.method == m) return tm;
  throw ConfigError("method not present in trial result");
}

TrialResult run_trial(const SystemConfig& config, std::uint64_t trial_seed) {
  return run_trial(config, trial_seed, parse_methods(config.methods));
}

TrialResult run_trial(const SystemConfig& config, std::uint64_t trial_seed,
                      const std::vector<Method>& methods) {
  config.validate();
  const TrialContext ctx = build_context_with_retry(config, trial_seed);
  TrialResult result;
  result.metrics.reserve(methods.size());
  for (Method m : methods)
    result.metrics.push_back(score(config, ctx, estimate_for(config, ctx, m)));
  return result;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSnr: return "snr";
    case SweepAxis::kEmIter: return "em_iter";
    case SweepAxis::kBemOrder: return "bem_order";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "snr") return SweepAxis::kSnr;
  if (name == "em_iter") return SweepAxis::kEmIter;
  if (name == "bem_order") return SweepAxis::kBemOrder;
  throw ConfigError("unknown sweep axis: " + name);
}

SweepResult sweep_snr(const SystemConfig& config,
                      const std::vector<double>& snr_grid, int trials) {
  config.validate();
  if (snr_grid.empty()) throw ConfigError("sweep_snr: empty grid");
  if (trials < 1) throw ConfigError("sweep_snr: trials must be >= 1");
  const auto methods = parse_methods(config.methods);
  const int n_threads = resolve_threads(config);

  SweepResult result;
  result.axis = SweepAxis::kSnr;
  result.base_seed = config.base_seed;
  for (double snr : snr_grid) {
    SystemConfig point_cfg = config;
    point_cfg.snr_db = snr;
    std::vector<TrialResult> per_trial(trials);
    parallel_for_trials(trials, n_threads, [&](int i) {
      per_trial[i] =
          run_trial(point_cfg, config.base_seed + static_cast<std::uint64_t>(i),
                    methods);
    });
    SweepPoint point;
    point.axis_value = snr;
    point.trials = trials;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      std::vector<double> nmse_vals(trials), ser_vals(trials);
      for (int i = 0; i < trials; ++i) {
        nmse_vals[i] = per_trial[i].metrics[mi].nmse;
        ser_vals[i] = per_trial[i].metrics[mi].ser;
      }
      point.per_method.push_back(
          aggregate(to_string(methods[mi]), nmse_vals, ser_vals));
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

SweepResult sweep_em_iterations(const SystemConfig& config,
                                const std::vector<int>& iter_grid,
                                const std::vector<double>& snr_list,
                                int trials) {
  config.validate();
  if (iter_grid.empty()) throw ConfigError("sweep_em_iterations: empty grid");
  if (snr_list.empty())
    throw ConfigError("sweep_em_iterations: empty SNR list");
  if (trials < 1)
    throw ConfigError("sweep_em_iterations: trials must be >= 1");
  const int n_threads = resolve_threads(config);
  const int n_iters = static_cast<int>(iter_grid.size());

  SweepResult result;
  result.axis = SweepAxis::kEmIter;
  result.base_seed = config.base_seed;
  result.points.resize(n_iters);
  for (int gi = 0; gi < n_iters; ++gi) {
    if (iter_grid[gi] < 1)
      throw ConfigError("sweep_em_iterations: iterations must be >= 1");
    result.points[gi].axis_value = iter_grid[gi];
    result.points[gi].trials = trials;
  }

  for (double snr : snr_list) {
    SystemConfig point_cfg = config;
    point_cfg.snr_db = snr;
    // per_trial[i] holds (nmse, ser) for every grid value of this SNR.
    std::vector<std::vector<std::pair<double, double>>> per_trial(trials);
    parallel_for_trials(trials, n_threads, [&](int i) {
      const TrialContext ctx = build_context_with_retry(
          point_cfg, config.base_seed + static_cast<std::uint64_t>(i));
      const auto init = pls_initial_estimate(ctx.obs, ctx.symbols);
      const auto& basis =
          cached_basis(point_cfg.n_data, point_cfg.bem_order);
      const auto hypotheses = make_hypotheses(point_cfg.constellation);
      auto& rows = per_trial[i];
      rows.resize(n_iters);
      for (int gi = 0; gi < n_iters; ++gi) {
        const auto est =
            em_estimate(ctx.obs, init, basis, hypotheses, iter_grid[gi]);
        rows[gi] = {nmse(ctx.ref_data, est.h_hat),
                    equalize_detect(ctx.obs, est, ctx.symbols).ser};
      }
    });
    for (int gi = 0; gi < n_iters; ++gi) {
      std::vector<double> nmse_vals(trials), ser_vals(trials);
      for (int i = 0; i < trials; ++i) {
        nmse_vals[i] = per_trial[i][gi].first;
        ser_vals[i] = per_trial[i][gi].second;
      }
      result.points[gi].per_method.push_back(
          aggregate("em_snr" + fmt_short(snr), nmse_vals, ser_vals));
    }
  }
  return result;
}

SweepResult sweep_bem_order(const SystemConfig& config,
                            const std::vector<int>& d_grid, int trials) {
  config.validate();
  if (d_grid.empty()) throw ConfigError("sweep_bem_order: empty grid");
  if (trials < 1) throw ConfigError("sweep_bem_order: trials must be >= 1");
  const int n_threads = resolve_threads(config);
  const int n_orders = static_cast<int>(d_grid.size());
  for (int d : d_grid)
    if (d < 1 || d > config.n_data)
      throw ConfigError("sweep_bem_order: order outside [1, n_data]");

  std::vector<std::vector<std::pair<double, double>>> per_trial(trials);
  parallel_for_trials(trials, n_threads, [&](int i) {
    const TrialContext ctx = build_context_with_retry(
        config, config.base_seed + static_cast<std::uint64_t>(i));
    const auto init = pls_initial_estimate(ctx.obs, ctx.symbols);
    const auto hypotheses = make_hypotheses(config.constellation);
    auto& rows = per_trial[i];
    rows.resize(n_orders);
    for (int di = 0; di < n_orders; ++di) {
      const auto& basis = cached_basis(config.n_data, d_grid[di]);
      const auto est =
          em_estimate(ctx.obs, init, basis, hypotheses, config.n_em);
      rows[di] = {nmse(ctx.ref_data, est.h_hat),
                  equalize_detect(ctx.obs, est, ctx.symbols).ser};
    }
  });

  SweepResult result;
  result.axis = SweepAxis::kBemOrder;
  result.base_seed = config.base_seed;
  for (int di = 0; di < n_orders; ++di) {
    SweepPoint point;
    point.axis_value = d_grid[di];
    point.trials = trials;
    std::vector<double> nmse_vals(trials), ser_vals(trials);
    for (int i = 0; i < trials; ++i) {
      nmse_vals[i] = per_trial[i][di].first;
      ser_vals[i] = per_trial[i][di].second;
    }
    point.per_method.push_back(aggregate("em", nmse_vals, ser_vals));
    result.points.push_back(std::move(point));
  }
  return result;
}

int argmin_mean_nmse(const SweepResult& result, const std::string& method) {
  int best = -1;
  double best_val = 0.0;
  for (std::size_t pi = 0; pi < result.points.size(); ++pi) {
    for (const auto& agg : result.points[pi].per_method) {
      if (agg.method != method) continue;
      if (best < 0 || agg.mean_nmse < best_val) {
        best = static_cast<int>(pi);
        best_val = agg.mean_nmse;
      }
    }
  }
  if (best < 0) throw ConfigError("argmin_mean_nmse: method not in sweep");
  return best;
}

void emit_results(const SweepResult& result,
                  const std::filesystem::path& stem) {
  const auto csv_path = std::filesystem::path(stem.string() + ".csv");
  const auto dat_path = std::filesystem::path(stem.string() + "_plot.dat");

  std::ostringstream csv;
  csv << "# leolink sweep: axis=" << to_string(result.axis)
      << " seed=" << result.base_seed << "\n";
  csv << "axis,method,mean_nmse,mean_ser,ci_nmse,ci_ser,median_nmse,"
         "median_ser,trials,seed\n";
  for (const auto& point : result.points) {
    for (const auto& agg : point.per_method) {
      csv << fmt_g17(point.axis_value) << ',' << agg.method << ','
          << fmt_g17(agg.mean_nmse) << ',' << fmt_g17(agg.mean_ser) << ','
          << fmt_g17(agg.ci_nmse) << ',' << fmt_g17(agg.ci_ser) << ','
          << fmt_g17(agg.median_nmse) << ',' << fmt_g17(agg.median_ser) << ','
          << point.trials << ',' << result.base_seed << "\n";
    }
  }

  std::ostringstream dat;
  dat << "# leolink sweep plot: axis=" << to_string(result.axis) << "\n";
  dat << "# columns: axis";
  if (!result.points.empty())
    for (const auto& agg : result.points.front().per_method)
      dat << ' ' << agg.method << "_nmse " << agg.method << "_ser";
  dat << "\n";
  for (const auto& point : result.points) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", point.axis_value);
    dat << buf;
    for (const auto& agg : point.per_method) {
      std::snprintf(buf, sizeof(buf), " %.6e %.6e", agg.mean_nmse,
                    agg.mean_ser);
      dat << buf;
    }
    dat << "\n";
  }

  for (const auto& [path, text] :
       {std::pair{csv_path, csv.str()}, std::pair{dat_path, dat.str()}}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
  }
}

SweepResult parse_results_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open " + csv_path.string());
  SweepResult result;
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto axis_pos = line.find("axis=");
      const auto seed_pos = line.find("seed=");
      if (axis_pos != std::string::npos && seed_pos != std::string::npos) {
        const auto axis_end = line.find(' ', axis_pos);
        result.axis = sweep_axis_from_string(
            line.substr(axis_pos + 5, axis_end - axis_pos - 5));
        result.base_seed = std::stoull(line.substr(seed_pos + 5));
        have_meta = true;
      }
      continue;
    }
    if (line.rfind("axis,", 0) == 0) continue;  // header
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 10)
      throw IoError("malformed sweep CSV row: " + line);
    const double axis_value = std::stod(fields[0]);
    MethodAggregate agg;
    agg.method = fields[1];
    agg.mean_nmse = std::stod(fields[2]);
    agg.mean_ser = std::stod(fields[3]);
    agg.ci_nmse = std::stod(fields[4]);
    agg.ci_ser = std::stod(fields[5]);
    agg.median_nmse = std::stod(fields[6]);
    agg.median_ser = std::stod(fields[7]);
    const int trials = std::stoi(fields[8]);
    if (result.points.empty() ||
        result.points.back().axis_value != axis_value) {
      SweepPoint point;
      point.axis_value = axis_value;
      point.trials = trials;
      result.points.push_back(std::move(point));
    }
    result.points.back().per_method.push_back(std::move(agg));
  }
  if (!have_meta) throw IoError("missing sweep metadata in " +
                                csv_path.string());
  return result;
}

}  // namespace leolink
