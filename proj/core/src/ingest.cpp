#include "statealign/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "statealign/error.hpp"

namespace statealign {

namespace {

constexpr int kMaxFillablePoints = 2;

std::vector<std::string> split_csv_line(std::string_view line, std::size_t row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": unterminated quote");
  fields.push_back(std::move(cur));
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return fields;
}

struct Row {
  EpochSeconds t;
  std::optional<double> value;
};

struct RawSeries {
  std::vector<Row> rows;
  SeriesMeta meta;
  std::size_t first_row = 0;
};

[[noreturn]] void parse_fail(std::size_t row, const std::string& column, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ", column '" + column + "': " + msg);
}

EpochSeconds parse_time(const std::string& s, std::size_t row) {
  EpochSeconds v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) parse_fail(row, "timestamp", "expected integer epoch seconds");
  return v;
}

std::optional<double> parse_value(const std::string& s, std::size_t row) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) parse_fail(row, "value", "expected a real number");
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

EpochSeconds min_step(const std::vector<Row>& rows) {
  EpochSeconds step = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const EpochSeconds d = rows[i].t - rows[i - 1].t;
    if (step == 0 || d < step) step = d;
  }
  return step;
}

}  // namespace

IngestResult ingest_csv_text(std::string_view text, const std::optional<TimeWindow>& window) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    header = split_csv_line(line, row);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, "row 1: missing header");

  int col_t = -1, col_id = -1, col_v = -1, col_group = -1;
  std::vector<int> label_cols;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const std::string& h = header[i];
    if (h == "timestamp") col_t = i;
    else if (h == "series_id") col_id = i;
    else if (h == "value") col_v = i;
    else if (h == "group_label") col_group = i;
    else label_cols.push_back(i);
  }
  if (col_t < 0) parse_fail(row, "timestamp", "required column missing from header");
  if (col_id < 0) parse_fail(row, "series_id", "required column missing from header");
  if (col_v < 0) parse_fail(row, "value", "required column missing from header");

  std::map<std::string, RawSeries> raw;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line, row);
    if (f.size() != header.size()) {
      parse_fail(row, "*", "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    }
    if (f[col_id].empty()) parse_fail(row, "series_id", "empty series id");
    const EpochSeconds t = parse_time(f[col_t], row);
    const auto v = parse_value(f[col_v], row);
    if (window && (t < window->start || t > window->end)) continue;
    auto [it, inserted] = raw.try_emplace(f[col_id]);
    RawSeries& s = it->second;
    if (inserted) {
      s.first_row = row;
      for (int c : label_cols) s.meta.dimension_labels.emplace_back(header[c], f[c]);
      if (col_group >= 0 && !f[col_group].empty()) s.meta.group_label = f[col_group];
    }
    s.rows.push_back({t, v});
  }

  IngestResult out;
  auto reject = [&](const std::string& id, ErrorCode code, const std::string& why) {
    out.rejected.push_back(id);
    out.warnings.push_back(std::string(to_string(code)) + ": series '" + id + "' dropped: " + why);
  };

  // Sort, drop duplicates-as-errors, and find each series' own stride.
  std::map<std::string, EpochSeconds> strides;
  for (auto& [id, s] : raw) {
    std::stable_sort(s.rows.begin(), s.rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
      if (s.rows[i].t == s.rows[i - 1].t) {
        throw Error(ErrorCode::ParseError, "series '" + id + "': duplicate timestamp " + std::to_string(s.rows[i].t));
      }
    }
    if (s.rows.size() < 2) {
      reject(id, ErrorCode::InsufficientOverlap, "fewer than 2 points in range");
      continue;
    }
    const EpochSeconds step = min_step(s.rows);
    bool regular = true;
    for (std::size_t i = 1; i < s.rows.size(); ++i) regular = regular && (s.rows[i].t - s.rows[i - 1].t) % step == 0;
    if (!regular) {
      reject(id, ErrorCode::IrregularStride, "timestamps are not on a uniform grid");
      continue;
    }
    strides[id] = step;
  }
  if (strides.empty()) {
    throw Error(ErrorCode::InsufficientOverlap, "no series with a usable time grid");
  }

  std::map<EpochSeconds, int> votes;
  for (const auto& [id, step] : strides) ++votes[step];
  EpochSeconds stride = votes.begin()->first;
  for (const auto& [step, count] : votes)
    if (count > votes[stride]) stride = step;
  out.stride = stride;

  EpochSeconds lo = std::numeric_limits<EpochSeconds>::min();
  EpochSeconds hi = std::numeric_limits<EpochSeconds>::max();
  std::vector<std::string> kept;
  for (const auto& [id, step] : strides) {
    if (step != stride) {
      reject(id, ErrorCode::IrregularStride,
             "stride " + std::to_string(step) + "s differs from the common " + std::to_string(stride) + "s");
      continue;
    }
    const auto& rows = raw[id].rows;
    if (!kept.empty() && ((rows.front().t - raw[kept.front()].rows.front().t) % stride) != 0) {
      reject(id, ErrorCode::InsufficientOverlap, "timestamps are offset from the common grid");
      continue;
    }
    kept.push_back(id);
    lo = std::max(lo, rows.front().t);
    hi = std::min(hi, rows.back().t);
  }
  if (kept.empty() || hi <= lo) {
    throw Error(ErrorCode::InsufficientOverlap, "retained series share fewer than 2 time points");
  }
  for (const auto& id : kept) {
    const auto& rows = raw[id].rows;
    if (rows.front().t != lo || rows.back().t != hi) {
      out.warnings.push_back("InsufficientOverlap: series '" + id + "' trimmed to the common span");
    }
  }

  const std::size_t n = static_cast<std::size_t>((hi - lo) / stride) + 1;
  for (const auto& id : kept) {
    const RawSeries& s = raw[id];
    std::vector<std::optional<double>> grid(n);
    for (const Row& r : s.rows) {
      if (r.t < lo || r.t > hi) continue;
      grid[static_cast<std::size_t>((r.t - lo) / stride)] = r.value;
    }
    // Interpolate short interior gaps; anything else rejects the series.
    std::vector<FilledGap> fills;
    std::string problem;
    for (std::size_t i = 0; i < n && problem.empty();) {
      if (grid[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < n && !grid[j]) ++j;
      const std::size_t len = j - i;
      if (i == 0 || j == n) {
        problem = "missing values at the edge of the common span";
      } else if (len > static_cast<std::size_t>(kMaxFillablePoints)) {
        problem = "gap of " + std::to_string(len) + " points at t=" + std::to_string(lo + static_cast<EpochSeconds>(i) * stride);
      } else {
        const double a = *grid[i - 1];
        const double b = *grid[j];
        for (std::size_t k = i; k < j; ++k) {
          const double w = static_cast<double>(k - i + 1) / static_cast<double>(len + 1);
          grid[k] = a + w * (b - a);
        }
        fills.push_back({id, lo + static_cast<EpochSeconds>(i) * stride, static_cast<int>(len)});
      }
      i = j;
    }
    if (!problem.empty()) {
      reject(id, ErrorCode::InsufficientOverlap, problem);
      continue;
    }
    TimeSeriesSegment seg;
    seg.series_id = id;
    seg.meta = s.meta;
    seg.timestamps.resize(n);
    seg.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      seg.timestamps[i] = lo + static_cast<EpochSeconds>(i) * stride;
      seg.values[i] = *grid[i];
    }
    for (auto& f : fills) {
      out.warnings.push_back("interpolated " + std::to_string(f.points) + " point(s) in series '" + id + "' at t=" +
                             std::to_string(f.first_missing));
      out.filled.push_back(std::move(f));
    }
    out.segments.push_back(std::move(seg));
  }
  std::sort(out.rejected.begin(), out.rejected.end());
  return out;
}

IngestResult ingest_csv(const std::filesystem::path& path, const std::optional<TimeWindow>& window) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open input '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ingest_csv_text(ss.str(), window);
}

std::string to_csv(const std::vector<TimeSeriesSegment>& segments) {
  std::vector<std::string> dims;
  bool any_group = false;
  for (const auto& s : segments) {
    any_group = any_group || s.meta.group_label.has_value();
    for (const auto& [k, v] : s.meta.dimension_labels)
      if (std::find(dims.begin(), dims.end(), k) == dims.end()) dims.push_back(k);
  }
  std::ostringstream os;
  os << "timestamp,series_id,value";
  for (const auto& d : dims) os << ',' << d;
  if (any_group) os << ",group_label";
  os << '\n';
  char buf[64];
  for (const auto& s : segments) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", s.values[i]);
      os << s.timestamps[i] << ',' << s.series_id << ',' << buf;
      for (const auto& d : dims) {
        os << ',';
        for (const auto& [k, v] : s.meta.dimension_labels)
          if (k == d) os << v;
      }
      if (any_group) os << ',' << s.meta.group_label.value_or("");
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace statealign
