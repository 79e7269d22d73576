#include "statealign/pipeline.hpp"

#include <algorithm>
#include <map>

#include "statealign/error.hpp"
#include "statealign/parallel.hpp"

namespace statealign {

namespace {

[[noreturn]] void rethrow_at(const std::string& id, const char* stage, const Error& e) {
  throw Error(e.code(), "series '" + id + "', stage " + stage + ": " + e.detail());
}

std::vector<int> normal_states(const StateAlphabet& alphabet, std::size_t n) {
  const int normal = alphabet.signed_states ? alphabet.magnitude_levels() - 1 : 0;
  return std::vector<int>(n, normal);
}

}  // namespace

std::vector<StateSequence> PipelineResult::sequences() const {
  std::vector<StateSequence> out;
  out.reserve(series.size());
  for (const auto& s : series) out.push_back(s.states);
  return out;
}

std::vector<SeriesAnalysis> analyze_series(const PipelineConfig& config,
                                           const std::vector<TimeSeriesSegment>& segments,
                                           std::vector<std::string>& warnings) {
  const StateAlphabet alphabet = config.state_alphabet();
  std::vector<SeriesAnalysis> out(segments.size());

  parallel_for(segments.size(), [&](std::size_t i) {
    const TimeSeriesSegment& seg = segments[i];
    SeriesAnalysis& a = out[i];
    a.series_id = seg.series_id;
    a.states.series_id = seg.series_id;
    a.states.alphabet = alphabet;
    try {
      seg.validate();
    } catch (const Error& e) {
      rethrow_at(seg.series_id, "validate", e);
    }
    try {
      a.params = fit_local_level(seg, config.fit_options());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSeries) rethrow_at(seg.series_id, "fit", e);
      a.degenerate = true;
      a.z.assign(seg.size(), 0.0);
      a.states.states = normal_states(alphabet, seg.size());
      return;
    }
    try {
      const FilterResult f = kalman_filter(a.params, seg);
      const ResidualProcess rp = config.estimator == Estimator::Smoother
                                     ? extract_residuals(seg, kalman_smooth(a.params, f), a.params)
                                     : extract_filtered_residuals(seg, f, a.params);
      a.z = standardize(rp);
    } catch (const Error& e) {
      rethrow_at(seg.series_id, "residuals", e);
    }
    if (config.state_method == StateMethod::Threshold) {
      try {
        a.states = threshold_discretize(a.z, alphabet, config.cuts, seg.series_id);
      } catch (const Error& e) {
        rethrow_at(seg.series_id, "discretize", e);
      }
    }
  });

  for (const auto& a : out) {
    if (a.degenerate) warnings.push_back("DegenerateSeries: '" + a.series_id + "' is constant; assigned the normal state");
  }

  if (config.state_method == StateMethod::Hmm) {
    std::vector<std::vector<double>> pooled;
    for (const auto& a : out)
      if (!a.degenerate) pooled.push_back(a.z);
    HmmOptions hopts;
    hopts.loglik_tol = config.loglik_tol;
    const HmmFit fit = hmm_fit(pooled, config.hmm_states, hopts);
    warnings.insert(warnings.end(), fit.warnings.begin(), fit.warnings.end());
    parallel_for(out.size(), [&](std::size_t i) {
      if (out[i].degenerate) return;
      out[i].states = hmm_decode(fit.params, out[i].z, alphabet, out[i].series_id);
    });
  }
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::vector<TimeSeriesSegment>& segments) {
  if (segments.size() < 2) {
    throw Error(ErrorCode::PreconditionViolation, "run_pipeline: need at least 2 series");
  }
  const std::size_t n_points = segments[0].size();
  for (const auto& s : segments) {
    if (s.size() != n_points) {
      throw Error(ErrorCode::ContractViolation, "run_pipeline: series '" + s.series_id + "' has length " +
                                                    std::to_string(s.size()) + ", expected " +
                                                    std::to_string(n_points));
    }
  }

  PipelineResult r;
  r.config = config;
  r.tau_max = config.tau_max ? *config.tau_max : default_tau_max(n_points);
  if (r.tau_max < 1 || static_cast<std::size_t>(r.tau_max) > n_points / 3) {
    throw Error(ErrorCode::ConfigError, "config.tau_max: must lie in [1, floor(N/3)] for N=" +
                                            std::to_string(n_points));
  }
  r.m_max_used = std::min<int>(config.m_max, static_cast<int>(segments.size()));
  if (r.m_max_used < config.m_max) {
    r.warnings.push_back("m_max reduced from " + std::to_string(config.m_max) + " to " +
                         std::to_string(r.m_max_used) + " (number of series)");
  }

  r.series = analyze_series(config, segments, r.warnings);
  const std::vector<StateSequence> seqs = r.sequences();
  r.pairwise = pairwise_alignment(seqs, r.tau_max);
  r.clusters = sac_dtw_cluster(r.pairwise.d_opt, r.pairwise.dci, r.m_max_used, config.iter_max, config.seed);

  const auto members = r.clusters.members();
  for (int c = 0; c < r.clusters.n_clusters; ++c) {
    const auto& m = members[c];
    if (m.size() < 2) {
      r.raw_min_shifted_cost.emplace_back();
      continue;
    }
    double raw = r.pairwise.min_shifted_cost(m[0], m[1]);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = i + 1; j < m.size(); ++j) raw = std::min(raw, r.pairwise.min_shifted_cost(m[i], m[j]));
    r.raw_min_shifted_cost.emplace_back(raw);

    ClusterRanking ranking;
    ranking.cluster = c;
    ranking.actionable = r.clusters.causality_scores[c] < 1.0;
    ranking.entries = rank_root_causes(m, r.pairwise.best_tau, seqs);
    r.rankings.push_back(std::move(ranking));
  }

  std::vector<std::optional<std::string>> truth;
  bool labelled = true;
  for (const auto& s : segments) {
    truth.push_back(s.meta.group_label);
    labelled = labelled && s.meta.group_label.has_value();
  }
  if (labelled) {
    Evaluation ev;
    ev.gini = gini_impurity(r.clusters.assignments, truth);
    ev.classification_error = classification_error(r.clusters.assignments, truth);
    for (int m = 2; m <= r.m_max_used; ++m) {
      const ClusterResult capped =
          m == r.m_max_used ? r.clusters
                            : sac_dtw_cluster(r.pairwise.d_opt, r.pairwise.dci, m, config.iter_max, config.seed);
      ev.error_by_m_max[m] = classification_error(capped.assignments, truth);
    }
    std::map<std::string, std::pair<int, double>> acc;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      auto& [count, sum] = acc[*truth[i]];
      ++count;
      sum += r.clusters.causality_scores[r.clusters.assignments[i]];
    }
    for (const auto& [group, cs] : acc) {
      GroupSummary g;
      g.group = group;
      g.size = cs.first;
      g.dci_avg = cs.second / cs.first;
      g.causal = g.dci_avg < config.causal_threshold;
      ev.groups.push_back(g);
    }
    r.evaluation = std::move(ev);
  }
  return r;
}

}  // namespace statealign
