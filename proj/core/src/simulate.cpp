#include "statealign/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "statealign/error.hpp"
#include "statealign/pipeline.hpp"

namespace statealign {

namespace {

// Uniform and normal draws built directly on the 64-bit engine so datasets do
// not depend on the standard library's distribution implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return rad * std::cos(2.0 * std::numbers::pi * u2);
  }

  int poisson(double lambda) {
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Draws `count` distinct values from [0, n) with a partial Fisher-Yates shuffle.
std::vector<int> sample_without_replacement(Rng& rng, int n, int count) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int k = 0; k < count; ++k) std::swap(pool[k], pool[k + rng.index(n - k)]);
  pool.resize(count);
  return pool;
}

std::string series_name(int group, int member) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "g%d-s%02d", group, member);
  return buf;
}

using nlohmann::json;

[[noreturn]] void spec_fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::SpecInvalid, path + ": " + msg);
}

}  // namespace

std::string_view to_string(SimMode mode) noexcept {
  return mode == SimMode::Causal ? "causal" : "non_causal";
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::SacFilter: return "sac-dtw-filter";
    case Method::SacSmoother: return "sac-dtw-smoother";
    case Method::CDtw: return "c-dtw";
  }
  return "unknown";
}

void SimSpec::validate() const {
  if (n_groups < 1) spec_fail("spec.n_groups", "must be >= 1");
  if (series_per_group < 1) spec_fail("spec.series_per_group", "must be >= 1");
  if (length < 8) spec_fail("spec.length", "must be >= 8");
  if (scale_exponents.empty()) spec_fail("spec.scale_exponents", "must not be empty");
  for (double e : scale_exponents)
    if (!std::isfinite(e) || std::abs(e) > 100) spec_fail("spec.scale_exponents", "entries must be finite and |e| <= 100");
  if (anomaly_intensities.empty()) spec_fail("spec.anomaly_intensities", "must not be empty");
  for (double a : anomaly_intensities)
    if (!(a > 0.0) || !std::isfinite(a)) spec_fail("spec.anomaly_intensities", "entries must be positive");
  if (causal_lags.empty()) spec_fail("spec.causal_lags", "must not be empty");
  for (int l : causal_lags)
    if (l < 0) spec_fail("spec.causal_lags", "entries must be >= 0");
  if (!(q_log10_min <= q_log10_max)) spec_fail("spec.q_log10_max", "must be >= q_log10_min");
  if (!(idiosyncratic_sd >= 0.0 && idiosyncratic_sd <= 1.0)) spec_fail("spec.idiosyncratic_sd", "must lie in [0, 1]");
  if (fanout < 1) spec_fail("spec.fanout", "must be >= 1");
  if (!(trend_sd >= 0.0)) spec_fail("spec.trend_sd", "must be >= 0");
  if (!(shock_rate >= 0.0)) spec_fail("spec.shock_rate", "must be >= 0");
  if (!(shock_min >= 0.0 && shock_min <= shock_max)) spec_fail("spec.shock_max", "need 0 <= shock_min <= shock_max");
  if (epicenter_min < 0 || epicenter_max > length - 2) {
    spec_fail("spec.epicenter_max", "the 3-point anomaly must fit inside the series");
  }
  if (epicenter_max - epicenter_min < n_groups) {
    spec_fail("spec.epicenter_max", "range too small for distinct epicenters per group");
  }
  if (m_max_sweep.empty()) spec_fail("spec.m_max_sweep", "must not be empty");
  for (int m : m_max_sweep)
    if (m < 2) spec_fail("spec.m_max_sweep", "entries must be >= 2");
}

namespace {

// Propagation tier of member k: 0 for the leader, then ceil(k / fanout).
int tier(const SimSpec& spec, int k) { return k == 0 ? 0 : (k - 1) / spec.fanout + 1; }

}  // namespace

SimDataset generate_dataset(const SimSpec& spec, double intensity) {
  spec.validate();
  if (!(intensity > 0.0) || !std::isfinite(intensity)) spec_fail("intensity", "must be positive");
  const int n = spec.length;
  const double shared_sd = std::sqrt(1.0 - spec.idiosyncratic_sd * spec.idiosyncratic_sd);

  SimDataset ds;
  ds.intensity = intensity;
  {
    Rng rng(spec.seed, 0);
    for (int e : sample_without_replacement(rng, spec.epicenter_max - spec.epicenter_min, spec.n_groups)) {
      ds.epicenters.push_back(spec.epicenter_min + e);
    }
  }

  for (int g = 0; g < spec.n_groups; ++g) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(g) + 1);
    const double q = std::pow(10.0, rng.uniform(spec.q_log10_min, spec.q_log10_max));
    const int lag = spec.causal_lags[g % spec.causal_lags.size()];
    const double scale = std::pow(10.0, spec.scale_exponents[g % spec.scale_exponents.size()]);
    // Same padding in both modes so a seed yields paired datasets.
    const int pad = tier(spec, spec.series_per_group - 1) * lag + 1;
    const int horizon = n + pad;

    std::vector<double> stream(horizon);
    for (double& v : stream) v = shared_sd * rng.normal();
    const int shocks = std::min(horizon, rng.poisson(spec.shock_rate * horizon / n));
    for (int pos : sample_without_replacement(rng, horizon, shocks)) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      stream[pos] += sign * rng.uniform(spec.shock_min, spec.shock_max);
    }
    const int epi = ds.epicenters[g];
    for (int j = 0; j < 3; ++j) stream[epi + pad + j] += intensity;

    const std::string group = "g" + std::to_string(g);
    // Member ids are a seeded permutation so a name never reveals the leader.
    Rng id_rng(spec.seed, (std::uint64_t{1} << 32) + static_cast<std::uint64_t>(g));
    const std::vector<int> ids = sample_without_replacement(id_rng, spec.series_per_group, spec.series_per_group);
    for (int k = 0; k < spec.series_per_group; ++k) {
      const std::string id = series_name(g, ids[k]);
      const int delay = spec.mode == SimMode::Causal ? tier(spec, k) * lag : 0;
      std::vector<double> y(n);
      const double slope = spec.trend_sd * rng.normal();
      double level = spec.level_offset;
      for (int t = 0; t < n; ++t) {
        if (t > 0) level += slope + std::sqrt(q) * rng.normal();
        y[t] = (level + stream[t - delay + pad] + spec.idiosyncratic_sd * rng.normal()) * scale;
      }
      TimeSeriesSegment seg = TimeSeriesSegment::from_values(id, std::move(y), 1'700'000'000, 60);
      seg.meta.group_label = group;
      seg.meta.dimension_labels = {{"group", group}};
      ds.segments.push_back(std::move(seg));

      Injection inj;
      inj.series_id = id;
      inj.group = group;
      inj.member = k;
      inj.onset = epi + delay;
      inj.visible = std::clamp(n - inj.onset, 0, 3);
      ds.schedule.push_back(std::move(inj));
    }
  }
  std::sort(ds.segments.begin(), ds.segments.end(),
            [](const TimeSeriesSegment& a, const TimeSeriesSegment& b) { return a.series_id < b.series_id; });
  std::sort(ds.schedule.begin(), ds.schedule.end(),
            [](const Injection& a, const Injection& b) { return a.series_id < b.series_id; });
  return ds;
}

std::vector<double> minmax_normalize(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  std::vector<double> out(values.size(), 0.5);
  if (range > 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - min) / range;
  }
  return out;
}

PairwiseMatrices cdtw_baseline(const std::vector<TimeSeriesSegment>& segments, int tau_max) {
  std::vector<std::vector<double>> normalized;
  normalized.reserve(segments.size());
  for (const auto& s : segments) normalized.push_back(minmax_normalize(s.values));
  return pairwise_alignment(normalized, tau_max);
}

MethodRun run_method(Method method, const std::vector<TimeSeriesSegment>& segments,
                     const PipelineConfig& config, const std::vector<int>& m_max_values) {
  if (segments.empty()) throw Error(ErrorCode::PreconditionViolation, "run_method: no series");
  const std::size_t n_points = segments[0].size();
  const int tau_max = config.tau_max ? *config.tau_max : default_tau_max(n_points);

  MethodRun run;
  if (method == Method::CDtw) {
    run.pairwise = cdtw_baseline(segments, tau_max);
  } else {
    PipelineConfig c = config;
    c.estimator = method == Method::SacFilter ? Estimator::Filter : Estimator::Smoother;
    std::vector<std::string> warnings;
    const auto analyses = analyze_series(c, segments, warnings);
    std::vector<StateSequence> seqs;
    seqs.reserve(analyses.size());
    for (const auto& a : analyses) seqs.push_back(a.states);
    run.pairwise = pairwise_alignment(seqs, tau_max);
  }
  const int n = static_cast<int>(segments.size());
  for (int m : m_max_values) {
    run.by_m_max[m] = sac_dtw_cluster(run.pairwise.d_opt, run.pairwise.dci, std::min(m, n),
                                      config.iter_max, config.seed);
  }
  return run;
}

ExperimentResult run_experiment(const SimSpec& spec, const PipelineConfig& config) {
  spec.validate();
  ExperimentResult out;
  std::vector<int> m_values = spec.m_max_sweep;
  if (std::find(m_values.begin(), m_values.end(), config.m_max) == m_values.end()) {
    m_values.push_back(config.m_max);
  }
  const SimMode other = spec.mode == SimMode::Causal ? SimMode::NonCausal : SimMode::Causal;
  const double n_int = static_cast<double>(spec.anomaly_intensities.size());

  for (SimMode mode : {spec.mode, other}) {
    SimSpec s = spec;
    s.mode = mode;
    for (double intensity : spec.anomaly_intensities) {
      const SimDataset ds = generate_dataset(s, intensity);
      std::vector<std::optional<std::string>> truth;
      for (const auto& seg : ds.segments) truth.push_back(seg.meta.group_label);
      for (Method method : kAllMethods) {
        const auto t0 = std::chrono::steady_clock::now();
        const MethodRun run = run_method(method, ds.segments, config, m_values);
        out.runtime_ms[method] +=
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
        const auto& scores = run.by_m_max.at(config.m_max).causality_scores;
        auto& samples = out.dci_samples[{method, mode}];
        samples.insert(samples.end(), scores.begin(), scores.end());
        if (mode != spec.mode) continue;
        for (int m : spec.m_max_sweep) {
          out.classification_error[{method, m}] +=
              classification_error(run.by_m_max.at(m).assignments, truth) / n_int;
        }
      }
    }
  }
  return out;
}

SimSpec parse_sim_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SpecInvalid, std::string("spec: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) spec_fail("spec", "expected an object");
  SimSpec s;
  auto num = [&](const char* key, auto& field) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) spec_fail(std::string("spec.") + key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned()) spec_fail(std::string("spec.") + key, "expected a non-negative integer");
      }
    } else {
      if (!it->is_number()) spec_fail(std::string("spec.") + key, "expected a number");
    }
    field = it->get<T>();
  };
  auto list = [&](const char* key, auto& field) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    using T = typename std::decay_t<decltype(field)>::value_type;
    if (!it->is_array()) spec_fail(std::string("spec.") + key, "expected an array");
    field.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& v = (*it)[i];
      const bool ok = std::is_integral_v<T> ? v.is_number_integer() : v.is_number();
      if (!ok) spec_fail(std::string("spec.") + key + "[" + std::to_string(i) + "]", "wrong type");
      field.push_back(v.get<T>());
    }
  };
  static const std::set<std::string> known{
      "n_groups",    "series_per_group", "length",     "scale_exponents", "anomaly_intensities",
      "causal_lags", "mode",             "seed",       "q_log10_min",     "q_log10_max",
      "idiosyncratic_sd", "shock_rate",  "shock_min",  "shock_max",       "epicenter_min",
      "epicenter_max", "level_offset",   "trend_sd",        "fanout", "m_max_sweep"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) spec_fail("spec." + key, "unknown field");
  }
  num("n_groups", s.n_groups);
  num("series_per_group", s.series_per_group);
  num("length", s.length);
  list("scale_exponents", s.scale_exponents);
  list("anomaly_intensities", s.anomaly_intensities);
  list("causal_lags", s.causal_lags);
  if (auto it = doc.find("mode"); it != doc.end()) {
    if (*it == "causal") s.mode = SimMode::Causal;
    else if (*it == "non_causal") s.mode = SimMode::NonCausal;
    else spec_fail("spec.mode", "expected \"causal\" or \"non_causal\"");
  }
  num("seed", s.seed);
  num("q_log10_min", s.q_log10_min);
  num("q_log10_max", s.q_log10_max);
  num("idiosyncratic_sd", s.idiosyncratic_sd);
  num("shock_rate", s.shock_rate);
  num("shock_min", s.shock_min);
  num("shock_max", s.shock_max);
  num("epicenter_min", s.epicenter_min);
  num("epicenter_max", s.epicenter_max);
  num("level_offset", s.level_offset);
  num("trend_sd", s.trend_sd);
  num("fanout", s.fanout);
  list("m_max_sweep", s.m_max_sweep);
  s.validate();
  return s;
}

SimSpec load_sim_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open spec '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sim_spec(ss.str());
}

std::string to_json(const SimSpec& s) {
  json doc;
  doc["n_groups"] = s.n_groups;
  doc["series_per_group"] = s.series_per_group;
  doc["length"] = s.length;
  doc["scale_exponents"] = s.scale_exponents;
  doc["anomaly_intensities"] = s.anomaly_intensities;
  doc["causal_lags"] = s.causal_lags;
  doc["mode"] = std::string(to_string(s.mode));
  doc["seed"] = s.seed;
  doc["q_log10_min"] = s.q_log10_min;
  doc["q_log10_max"] = s.q_log10_max;
  doc["idiosyncratic_sd"] = s.idiosyncratic_sd;
  doc["shock_rate"] = s.shock_rate;
  doc["shock_min"] = s.shock_min;
  doc["shock_max"] = s.shock_max;
  doc["fanout"] = s.fanout;
  doc["epicenter_min"] = s.epicenter_min;
  doc["epicenter_max"] = s.epicenter_max;
  doc["level_offset"] = s.level_offset;
  doc["trend_sd"] = s.trend_sd;
  doc["m_max_sweep"] = s.m_max_sweep;
  return doc.dump(2);
}

}  // namespace statealign
