#include "statealign/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "statealign/error.hpp"

namespace statealign {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

std::int64_t get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

double get_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

int get_bounded(const json& v, const std::string& path, int lo, int hi) {
  const std::int64_t x = get_int(v, path);
  if (x < lo || x > hi) {
    fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

}  // namespace

StateAlphabet PipelineConfig::state_alphabet() const {
  if (alphabet == AlphabetKind::Signed) return StateAlphabet::five_state_signed();
  const int levels = state_method == StateMethod::Hmm ? hmm_states : static_cast<int>(cuts.size()) + 1;
  return StateAlphabet::magnitude(levels);
}

PipelineConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("config", "expected an object");

  static const std::set<std::string> known{
      "window",   "state_method", "estimator", "cuts",     "hmm_states",       "tau_max",      "m_max",
      "iter_max", "seed",         "alphabet",  "causal_threshold", "max_em_iters", "loglik_tol"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) fail("config." + key, "unknown field");
  }

  PipelineConfig c;
  if (auto it = doc.find("window"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) fail("config.window", "expected an object with start and end");
    for (const auto& [key, value] : it->items()) {
      if (key != "start" && key != "end") fail("config.window." + key, "unknown field");
    }
    if (!it->contains("start") || !it->contains("end")) fail("config.window", "needs start and end");
    TimeWindow w{get_int(it->at("start"), "config.window.start"), get_int(it->at("end"), "config.window.end")};
    if (w.end < w.start) fail("config.window.end", "must not precede start");
    c.window = w;
  }
  if (auto it = doc.find("state_method"); it != doc.end()) {
    const std::string s = get_string(*it, "config.state_method");
    if (s == "threshold") c.state_method = StateMethod::Threshold;
    else if (s == "hmm") c.state_method = StateMethod::Hmm;
    else fail("config.state_method", "expected \"threshold\" or \"hmm\"");
  }
  if (auto it = doc.find("estimator"); it != doc.end()) {
    const std::string s = get_string(*it, "config.estimator");
    if (s == "filter") c.estimator = Estimator::Filter;
    else if (s == "smoother") c.estimator = Estimator::Smoother;
    else fail("config.estimator", "expected \"filter\" or \"smoother\"");
  }
  if (auto it = doc.find("alphabet"); it != doc.end()) {
    const std::string s = get_string(*it, "config.alphabet");
    if (s == "3-state") c.alphabet = AlphabetKind::Unsigned;
    else if (s == "5-state-signed") c.alphabet = AlphabetKind::Signed;
    else fail("config.alphabet", "expected \"3-state\" or \"5-state-signed\"");
  }
  if (auto it = doc.find("cuts"); it != doc.end()) {
    if (!it->is_array() || it->empty()) fail("config.cuts", "expected a non-empty array");
    c.cuts.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "config.cuts[" + std::to_string(i) + "]";
      const double v = get_real((*it)[i], path);
      if (!(v > 0.0)) fail(path, "must be positive");
      if (i > 0 && !(v > c.cuts.back())) fail(path, "cuts must be strictly ascending");
      c.cuts.push_back(v);
    }
  }
  if (auto it = doc.find("hmm_states"); it != doc.end()) c.hmm_states = get_bounded(*it, "config.hmm_states", 2, 16);
  if (auto it = doc.find("tau_max"); it != doc.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "auto") fail("config.tau_max", "expected an integer or \"auto\"");
    } else {
      c.tau_max = get_bounded(*it, "config.tau_max", 1, 1 << 20);
    }
  }
  if (auto it = doc.find("m_max"); it != doc.end()) c.m_max = get_bounded(*it, "config.m_max", 2, 1 << 20);
  if (auto it = doc.find("iter_max"); it != doc.end()) c.iter_max = get_bounded(*it, "config.iter_max", 1, 1 << 20);
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) fail("config.seed", "expected a non-negative integer");
    c.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("causal_threshold"); it != doc.end()) {
    c.causal_threshold = get_real(*it, "config.causal_threshold");
    if (!(c.causal_threshold >= 0.0 && c.causal_threshold <= 1.0)) fail("config.causal_threshold", "must lie in [0, 1]");
  }
  if (auto it = doc.find("max_em_iters"); it != doc.end()) {
    c.max_em_iters = get_bounded(*it, "config.max_em_iters", 1, 100000);
  }
  if (auto it = doc.find("loglik_tol"); it != doc.end()) {
    c.loglik_tol = get_real(*it, "config.loglik_tol");
    if (!(c.loglik_tol > 0.0)) fail("config.loglik_tol", "must be positive");
  }

  if (c.alphabet == AlphabetKind::Signed) {
    if (c.state_method == StateMethod::Threshold && c.cuts.size() != 2) {
      fail("config.cuts", "the 5-state-signed alphabet needs exactly 2 cuts");
    }
    if (c.state_method == StateMethod::Hmm && c.hmm_states != 3) {
      fail("config.hmm_states", "the 5-state-signed alphabet needs 3 magnitude states");
    }
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const PipelineConfig& c) {
  json doc;
  doc["window"] = c.window ? json{{"start", c.window->start}, {"end", c.window->end}} : json(nullptr);
  doc["state_method"] = c.state_method == StateMethod::Hmm ? "hmm" : "threshold";
  doc["estimator"] = c.estimator == Estimator::Filter ? "filter" : "smoother";
  doc["cuts"] = c.cuts;
  doc["hmm_states"] = c.hmm_states;
  doc["tau_max"] = c.tau_max ? json(*c.tau_max) : json("auto");
  doc["m_max"] = c.m_max;
  doc["iter_max"] = c.iter_max;
  doc["seed"] = c.seed;
  doc["alphabet"] = c.alphabet == AlphabetKind::Signed ? "5-state-signed" : "3-state";
  doc["causal_threshold"] = c.causal_threshold;
  doc["max_em_iters"] = c.max_em_iters;
  doc["loglik_tol"] = c.loglik_tol;
  return doc.dump(2);
}

}  // namespace statealign
