#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "statealign/error.hpp"
#include "statealign/pipeline.hpp"
#include "statealign/simulate.hpp"

namespace sa = statealign;

namespace {

std::map<std::string, std::vector<const sa::Injection*>> by_group(const sa::SimDataset& ds) {
  std::map<std::string, std::vector<const sa::Injection*>> out;
  for (const auto& inj : ds.schedule) out[inj.group].push_back(&inj);
  for (auto& [g, v] : out) {
    std::sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->member < b->member; });
  }
  return out;
}

std::vector<std::vector<int>> states_of(const std::vector<sa::TimeSeriesSegment>& segs) {
  std::vector<std::string> warnings;
  std::vector<std::vector<int>> out;
  for (const auto& a : sa::analyze_series(sa::PipelineConfig{}, segs, warnings)) out.push_back(a.states.states);
  return out;
}

}  // namespace

TEST(GenerateDataset, DefaultShape) {
  const sa::SimSpec spec;
  const auto ds = sa::generate_dataset(spec, 5.0);
  ASSERT_EQ(ds.segments.size(), 50u);
  ASSERT_EQ(ds.schedule.size(), 50u);
  EXPECT_EQ(std::set<int>(ds.epicenters.begin(), ds.epicenters.end()).size(), 5u);
  for (int e : ds.epicenters) {
    EXPECT_GE(e, spec.epicenter_min);
    EXPECT_LT(e, spec.epicenter_max);
  }
  for (std::size_t i = 0; i < ds.segments.size(); ++i) {
    const auto& seg = ds.segments[i];
    EXPECT_NO_THROW(seg.validate());
    EXPECT_EQ(seg.size(), 50u);
    EXPECT_EQ(seg.series_id, ds.schedule[i].series_id);
    EXPECT_EQ(seg.meta.group_label, ds.schedule[i].group);
    if (i > 0) {
      EXPECT_LT(ds.segments[i - 1].series_id, seg.series_id);
    }
  }
}

TEST(GenerateDataset, CausalOnsetsFollowTheChain) {
  sa::SimSpec spec;
  const auto ds = sa::generate_dataset(spec, 5.0);
  int g = 0;
  for (const auto& [group, members] : by_group(ds)) {
    ASSERT_EQ(members.size(), 10u);
    const int lag = spec.causal_lags[g % spec.causal_lags.size()];
    for (std::size_t k = 0; k < members.size(); ++k) {
      EXPECT_EQ(members[k]->member, static_cast<int>(k));
      EXPECT_EQ(members[k]->onset, ds.epicenters[g] + static_cast<int>(k) * lag);
      EXPECT_EQ(members[k]->visible, std::clamp(50 - members[k]->onset, 0, 3));
    }
    ++g;
  }
}

TEST(GenerateDataset, FanoutGroupsFollowersIntoTiers) {
  sa::SimSpec spec;
  spec.fanout = 3;
  const auto ds = sa::generate_dataset(spec, 5.0);
  const auto groups = by_group(ds);
  const auto& members = groups.begin()->second;
  const int lag = spec.causal_lags[0];
  const int epi = ds.epicenters[0];
  const std::vector<int> tiers{0, 1, 1, 1, 2, 2, 2, 3, 3, 3};
  for (std::size_t k = 0; k < members.size(); ++k) EXPECT_EQ(members[k]->onset, epi + tiers[k] * lag);
}

TEST(GenerateDataset, NonCausalOnsetsCoincide) {
  sa::SimSpec spec;
  spec.mode = sa::SimMode::NonCausal;
  const auto ds = sa::generate_dataset(spec, 5.0);
  int g = 0;
  for (const auto& [group, members] : by_group(ds)) {
    for (const auto* m : members) EXPECT_EQ(m->onset, ds.epicenters[g]);
    ++g;
  }
}

TEST(GenerateDataset, LeaderIsNotRevealedByName) {
  // Over several seeds the leader should not always carry the same member id.
  std::set<std::string> leader_suffixes;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    sa::SimSpec spec;
    spec.seed = seed;
    for (const auto& inj : sa::generate_dataset(spec, 5.0).schedule) {
      if (inj.member == 0) leader_suffixes.insert(inj.series_id.substr(inj.series_id.find('-')));
    }
  }
  EXPECT_GT(leader_suffixes.size(), 1u);
}

TEST(GenerateDataset, GroupScalesSpanOrdersOfMagnitude) {
  const auto ds = sa::generate_dataset(sa::SimSpec{}, 5.0);
  std::map<std::string, double> mean_abs;
  for (const auto& seg : ds.segments) {
    double s = 0.0;
    for (double v : seg.values) s += std::abs(v);
    mean_abs[*seg.meta.group_label] += s / seg.size();
  }
  const auto [lo, hi] = std::minmax_element(mean_abs.begin(), mean_abs.end(),
                                            [](auto& a, auto& b) { return a.second < b.second; });
  EXPECT_GE(hi->second / lo->second, 1e4);
}

TEST(GenerateDataset, Deterministic) {
  sa::SimSpec spec;
  spec.seed = 17;
  const auto a = sa::generate_dataset(spec, 3.0);
  const auto b = sa::generate_dataset(spec, 3.0);
  ASSERT_EQ(a.segments.size(), b.segments.size());
  for (std::size_t i = 0; i < a.segments.size(); ++i) EXPECT_EQ(a.segments[i].values, b.segments[i].values);
  spec.seed = 18;
  EXPECT_NE(sa::generate_dataset(spec, 3.0).segments[0].values, a.segments[0].values);
}

TEST(GenerateDataset, StatesIgnoreScale) {
  sa::SimSpec small;
  small.scale_exponents = {0.0};
  sa::SimSpec large = small;
  large.scale_exponents = {5.0};
  const auto a = sa::generate_dataset(small, 5.0);
  const auto b = sa::generate_dataset(large, 5.0);
  EXPECT_NEAR(b.segments[0].values[0] / a.segments[0].values[0], 1e5, 1e-6);
  EXPECT_EQ(states_of(a.segments), states_of(b.segments));
}

TEST(GenerateDataset, RejectsBadIntensity) {
  EXPECT_THROW(sa::generate_dataset(sa::SimSpec{}, 0.0), sa::Error);
  EXPECT_THROW(sa::generate_dataset(sa::SimSpec{}, NAN), sa::Error);
}

TEST(MinmaxNormalize, Examples) {
  EXPECT_EQ(sa::minmax_normalize({0, 5, 10}), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(sa::minmax_normalize({4, 4, 4}), (std::vector<double>{0.5, 0.5, 0.5}));
  EXPECT_TRUE(sa::minmax_normalize({}).empty());
}

TEST(CdtwBaseline, IdenticalPair) {
  std::vector<double> v{1, 3, 2, 8, 5, 4, 6, 7, 2, 1, 0, 3};
  const std::vector<sa::TimeSeriesSegment> segs{sa::TimeSeriesSegment::from_values("a", v),
                                                sa::TimeSeriesSegment::from_values("b", v)};
  const auto p = sa::cdtw_baseline(segs, 2);
  EXPECT_EQ(p.d_opt(0, 1), 0.0);
  EXPECT_EQ(p.dci(0, 1), 1.0);
}

TEST(CdtwBaseline, SpikeDominatesRawValuesButNotStates) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> base(50);
  double level = 10.0;
  for (double& v : base) v = (level += 0.3 * noise(rng)) + 0.5 * noise(rng);
  std::vector<double> other(base);
  for (double& v : other) v += 0.05 * noise(rng);
  std::vector<double> spiked(other);
  double range = *std::max_element(base.begin(), base.end()) - *std::min_element(base.begin(), base.end());
  spiked[25] += 100.0 * range;

  const auto seg = [](const char* id, std::vector<double> v) { return sa::TimeSeriesSegment::from_values(id, v); };
  const double clean = sa::cdtw_baseline({seg("a", base), seg("b", other)}, 12).d_opt(0, 1);
  const double dirty = sa::cdtw_baseline({seg("a", base), seg("b", spiked)}, 12).d_opt(0, 1);
  EXPECT_GT(dirty, 10.0 * clean);

  const auto before = states_of({seg("b", other), seg("c", base)})[0];
  const auto after = states_of({seg("b", spiked), seg("c", base)})[0];
  EXPECT_EQ(after[25], 2);
  for (std::size_t t = 0; t < before.size(); ++t) {
    if (t < 24 || t > 26) {
      EXPECT_EQ(before[t], after[t]) << "t=" << t;
    }
  }
}

TEST(SimSpec, JsonRoundTrip) {
  sa::SimSpec spec;
  spec.seed = 9;
  spec.mode = sa::SimMode::NonCausal;
  spec.fanout = 2;
  spec.anomaly_intensities = {4.5};
  EXPECT_EQ(sa::parse_sim_spec(sa::to_json(spec)), spec);
  EXPECT_EQ(sa::parse_sim_spec("{}"), sa::SimSpec{});
}

TEST(SimSpec, ErrorsNameTheField) {
  const auto field_of = [](const char* text) {
    try {
      sa::parse_sim_spec(text);
    } catch (const sa::Error& e) {
      EXPECT_EQ(e.code(), sa::ErrorCode::SpecInvalid);
      return e.detail().substr(0, e.detail().find(':'));
    }
    return std::string("no error");
  };
  EXPECT_EQ(field_of(R"({"n_groups": 0})"), "spec.n_groups");
  EXPECT_EQ(field_of(R"({"fanout": 0})"), "spec.fanout");
  EXPECT_EQ(field_of(R"({"mode": "sideways"})"), "spec.mode");
  EXPECT_EQ(field_of(R"({"causal_lags": [1, "x"]})"), "spec.causal_lags[1]");
  EXPECT_EQ(field_of(R"({"bogus": 1})"), "spec.bogus");
  EXPECT_EQ(field_of(R"({"epicenter_min": 8, "epicenter_max": 10})"), "spec.epicenter_max");
  EXPECT_EQ(field_of("[1]"), "spec");
}
