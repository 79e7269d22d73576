#include "statealign/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "statealign/error.hpp"

namespace statealign {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

ojson num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

ojson num(const std::optional<double>& v) { return v ? num(*v) : ojson(nullptr); }

std::string label(const StateAlphabet& alphabet, int rank) {
  return rank >= 0 && rank < alphabet.size() ? alphabet.labels[rank] : std::to_string(rank);
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
  written.push_back(path);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
}

std::string method_name(const PipelineConfig& c) {
  return c.estimator == Estimator::Filter ? "sac-dtw-filter" : "sac-dtw-smoother";
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  if (std::strcmp(buf, "-0") == 0) return "0";
  return buf;
}

std::string input_digest(const std::vector<TimeSeriesSegment>& segments) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto feed_u64 = [&](std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    feed(bytes, 8);
  };
  for (const auto& s : segments) {
    feed(s.series_id.data(), s.series_id.size());
    feed("\0", 1);
    feed_u64(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      feed_u64(static_cast<std::uint64_t>(s.timestamps[i]));
      std::uint64_t bits;
      std::memcpy(&bits, &s.values[i], sizeof bits);
      feed_u64(bits);
    }
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

ojson build_report(const PipelineResult& r, const IngestResult& ingest) {
  const auto& ids = r.series;
  ojson doc;
  doc["tool"] = {{"name", "statealign"}, {"version", kVersion}};

  ojson input;
  input["digest"] = input_digest(ingest.segments);
  input["n_series"] = r.series.size();
  input["length"] = r.series.empty() ? 0 : r.series.front().z.size();
  input["stride_seconds"] = ingest.stride;
  ojson filled = ojson::array();
  for (const auto& f : ingest.filled) {
    filled.push_back({{"series_id", f.series_id}, {"first_missing", f.first_missing}, {"points", f.points}});
  }
  input["interpolated"] = filled;
  input["rejected"] = ingest.rejected;
  doc["input"] = input;
  doc["config"] = ojson::parse(to_json(r.config));
  doc["tau_max"] = r.tau_max;
  doc["m_max_used"] = r.m_max_used;

  std::vector<std::string> warnings = ingest.warnings;
  warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  doc["warnings"] = warnings;

  ojson series = ojson::array();
  for (const auto& s : r.series) {
    ojson e;
    e["series_id"] = s.series_id;
    e["degenerate"] = s.degenerate;
    if (!s.degenerate) {
      e["params"] = {{"a", num(s.params.a)}, {"c", num(s.params.c)}, {"q", num(s.params.q)},
                     {"r", num(s.params.r)}, {"x0", num(s.params.x0)}, {"p0", num(s.params.p0)}};
    }
    e["first_top_entry"] = s.states.first_top_entry();
    series.push_back(e);
  }
  doc["series"] = series;

  ojson pairs = ojson::array();
  const std::size_t n = ids.size();
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      pairs.push_back({{"series_u", ids[u].series_id},
                       {"series_v", ids[v].series_id},
                       {"d_opt_zero", num(r.pairwise.d_opt(u, v))},
                       {"dci", num(r.pairwise.dci(u, v))},
                       {"best_tau", r.pairwise.best_tau(u, v)},
                       {"min_shifted_cost", num(r.pairwise.min_shifted_cost(u, v))}});
    }
  }
  doc["pairs"] = pairs;

  const auto members = r.clusters.members();
  ojson clusters = ojson::array();
  for (int c = 0; c < r.clusters.n_clusters; ++c) {
    std::vector<std::string> names;
    for (int m : members[c]) names.push_back(ids[m].series_id);
    clusters.push_back({{"cluster_id", c},
                        {"medoid", ids[r.clusters.medoids[c]].series_id},
                        {"members", names},
                        {"causality_score", num(r.clusters.causality_scores[c])},
                        {"raw_min_shifted_cost", num(r.raw_min_shifted_cost[c])}});
  }
  doc["n_clusters"] = r.clusters.n_clusters;
  doc["within_cost"] = num(r.clusters.within_cost);
  doc["clusters"] = clusters;

  ojson curve = ojson::array();
  for (const auto& [m, sil] : r.clusters.selection_curve) {
    curve.push_back({{"m", m}, {"silhouette", num(sil)}, {"within_cost", num(r.clusters.within_cost_curve.at(m))}});
  }
  doc["selection_curve"] = curve;

  ojson ranking = ojson::array();
  std::vector<int> actionable;
  for (const auto& cr : r.rankings) {
    ojson entries = ojson::array();
    for (const auto& e : cr.entries) {
      entries.push_back({{"series_id", e.series_id}, {"precedence", e.precedence}, {"first_top_entry", e.first_top}});
    }
    ranking.push_back({{"cluster_id", cr.cluster}, {"actionable", cr.actionable}, {"entries", entries}});
    if (cr.actionable) actionable.push_back(cr.cluster);
  }
  doc["ranking"] = ranking;
  doc["actionable_clusters"] = actionable;

  if (r.evaluation) {
    const Evaluation& ev = *r.evaluation;
    ojson e;
    ojson gini = ojson::array();
    for (std::size_t c = 0; c < ev.gini.per_cluster.size(); ++c) {
      gini.push_back({{"cluster_id", c}, {"gini", num(ev.gini.per_cluster[c])}});
    }
    e["gini_per_cluster"] = gini;
    e["gini_weighted"] = num(ev.gini.weighted);
    e["classification_error"] = num(ev.classification_error);
    ojson curve_err = ojson::array();
    for (const auto& [m, err] : ev.error_by_m_max) curve_err.push_back({{"m_max", m}, {"error", num(err)}});
    e["classification_error_by_m_max"] = curve_err;
    ojson groups = ojson::array();
    for (const auto& g : ev.groups) {
      groups.push_back({{"group", g.group},
                        {"size", g.size},
                        {"dci_avg", num(g.dci_avg)},
                        {"annotation", g.causal ? "C" : "NC"}});
    }
    e["groups"] = groups;
    doc["evaluation"] = e;
  }
  return doc;
}

}  // namespace

std::string report_json(const PipelineResult& r, const IngestResult& ingest) {
  return build_report(r, ingest).dump(2) + "\n";
}

std::string report_text(const PipelineResult& r, const IngestResult& ingest) {
  std::ostringstream os;
  const auto members = r.clusters.members();
  os << "statealign report\n";
  os << "series: " << r.series.size() << "  tau_max: " << r.tau_max << "  clusters: " << r.clusters.n_clusters
     << "  within_cost: " << format_number(r.clusters.within_cost) << "\n\n";

  os << std::left << std::setw(9) << "cluster" << std::setw(7) << "size" << std::setw(10) << "score"
     << std::setw(10) << "raw_cost" << "members\n";
  for (int c = 0; c < r.clusters.n_clusters; ++c) {
    os << std::setw(9) << c << std::setw(7) << members[c].size() << std::setw(10)
       << format_number(r.clusters.causality_scores[c]) << std::setw(10)
       << (r.raw_min_shifted_cost[c] ? format_number(*r.raw_min_shifted_cost[c]) : std::string("-"));
    for (std::size_t i = 0; i < members[c].size(); ++i) {
      os << (i ? " " : "") << r.series[members[c][i]].series_id;
    }
    os << '\n';
  }

  os << "\nroot-cause ranking (actionable clusters)\n";
  bool any = false;
  for (const auto& cr : r.rankings) {
    if (!cr.actionable) continue;
    any = true;
    os << "cluster " << cr.cluster << ":";
    for (const auto& e : cr.entries) os << ' ' << e.series_id << '(' << (e.precedence > 0 ? "+" : "") << e.precedence << ')';
    os << '\n';
  }
  if (!any) os << "(none)\n";

  if (r.evaluation) {
    const Evaluation& ev = *r.evaluation;
    os << "\nevaluation\n";
    os << std::setw(16) << "group" << std::setw(7) << "size" << std::setw(10) << "DCI-Avg" << "C/NC\n";
    for (const auto& g : ev.groups) {
      os << std::setw(16) << g.group << std::setw(7) << g.size << std::setw(10) << format_number(g.dci_avg)
         << (g.causal ? "C" : "NC") << '\n';
    }
    os << "gini per cluster:";
    for (double g : ev.gini.per_cluster) os << ' ' << format_number(g);
    os << "\ngini (weighted): " << format_number(ev.gini.weighted) << '\n';
    os << "classification error: " << format_number(ev.classification_error) << '\n';
  }

  std::vector<std::string> warnings = ingest.warnings;
  warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  if (!warnings.empty()) {
    os << "\nwarnings\n";
    for (const auto& w : warnings) os << "- " << w << '\n';
  }
  return os.str();
}

std::vector<std::filesystem::path> emit_outputs(const PipelineResult& r, const IngestResult& ingest,
                                                const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  write_file(dir / "report.json", report_json(r, ingest), written);
  write_file(dir / "summary.txt", report_text(r, ingest), written);

  std::ostringstream dci;
  dci << "cluster_id,size,causality_score\n";
  const auto members = r.clusters.members();
  for (int c = 0; c < r.clusters.n_clusters; ++c) {
    dci << c << ',' << members[c].size() << ',' << format_number(r.clusters.causality_scores[c]) << '\n';
  }
  write_file(dir / "dci_samples.csv", dci.str(), written);

  std::ostringstream st;
  st << "series_id,t,z,state,label\n";
  for (const auto& s : r.series) {
    for (std::size_t t = 0; t < s.states.size(); ++t) {
      const int rank = s.states.states[t];
      st << s.series_id << ',' << t << ',' << format_number(s.z[t]) << ',' << rank << ','
         << label(s.states.alphabet, rank) << '\n';
    }
  }
  write_file(dir / "states.csv", st.str(), written);

  if (r.evaluation) {
    std::ostringstream ce;
    ce << "method,m_max,error\n";
    for (const auto& [m, err] : r.evaluation->error_by_m_max) {
      ce << method_name(r.config) << ',' << m << ',' << format_number(err) << '\n';
    }
    write_file(dir / "classification_error.csv", ce.str(), written);
  }
  return written;
}

std::vector<std::filesystem::path> emit_experiment(const ExperimentResult& res, const SimSpec& spec,
                                                   const PipelineConfig& config,
                                                   const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  ojson doc;
  doc["tool"] = {{"name", "statealign"}, {"version", kVersion}};
  doc["spec"] = ojson::parse(to_json(spec));
  doc["config"] = ojson::parse(to_json(config));
  ojson err = ojson::array();
  std::ostringstream ce;
  ce << "method,m_max,error\n";
  for (const auto& [key, value] : res.classification_error) {
    err.push_back({{"method", to_string(key.first)}, {"m_max", key.second}, {"error", num(value)}});
    ce << to_string(key.first) << ',' << key.second << ',' << format_number(value) << '\n';
  }
  doc["classification_error"] = err;
  ojson samples = ojson::array();
  std::ostringstream dci;
  dci << "method,mode,causality_score\n";
  for (const auto& [key, values] : res.dci_samples) {
    ojson vals = ojson::array();
    for (double v : values) {
      vals.push_back(num(v));
      dci << to_string(key.first) << ',' << to_string(key.second) << ',' << format_number(v) << '\n';
    }
    samples.push_back({{"method", to_string(key.first)}, {"mode", to_string(key.second)}, {"scores", vals}});
  }
  doc["dci_samples"] = samples;
  write_file(dir / "experiment.json", doc.dump(2) + "\n", written);
  write_file(dir / "classification_error.csv", ce.str(), written);
  write_file(dir / "dci_samples.csv", dci.str(), written);

  ojson rt;
  for (const auto& [method, ms] : res.runtime_ms) rt[std::string(to_string(method))] = ms;
  write_file(dir / "runtime.json", rt.dump(2) + "\n", written);
  return written;
}

std::vector<std::filesystem::path> emit_simulation(const SimSpec& spec, const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  ojson schedule;
  schedule["spec"] = ojson::parse(to_json(spec));
  ojson datasets = ojson::array();
  for (std::size_t i = 0; i < spec.anomaly_intensities.size(); ++i) {
    const SimDataset ds = generate_dataset(spec, spec.anomaly_intensities[i]);
    const std::string file = "dataset_" + std::to_string(i) + ".csv";
    write_file(dir / file, to_csv(ds.segments), written);
    ojson inj = ojson::array();
    for (const auto& e : ds.schedule) {
      inj.push_back({{"series_id", e.series_id},
                     {"group", e.group},
                     {"member", e.member},
                     {"onset", e.onset},
                     {"visible_points", e.visible}});
    }
    datasets.push_back({{"file", file}, {"intensity", num(ds.intensity)}, {"epicenters", ds.epicenters},
                        {"injections", inj}});
  }
  schedule["datasets"] = datasets;
  write_file(dir / "schedule.json", schedule.dump(2) + "\n", written);
  return written;
}

}  // namespace statealign
