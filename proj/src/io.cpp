#include "wlvm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace wlvm {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_number(const std::string& text, int line_no,
                    const std::string& what) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("non-numeric " + what + " at line " +
                    std::to_string(line_no) + ": '" + text + "'");
  }
  return value;
}

}  // namespace

LoadedPanel load_long_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  if (strip_cr(line) != "subject_id,indicator_id,score,weight") {
    throw DataError("expected header 'subject_id,indicator_id,score,weight'");
  }

  std::vector<RawPanelRecord> records;
  std::vector<int> record_lines;
  std::unordered_map<std::string, Index> subject_index;
  std::unordered_map<std::string, Index> indicator_index;
  std::vector<std::string> subject_ids;
  std::vector<std::string> indicator_names;
  // (indicator, subject) -> line number, for duplicate reporting
  std::map<std::pair<Index, Index>, int> seen;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw DataError("expected 4 fields at line " + std::to_string(line_no));
    }
    RawPanelRecord rec;
    rec.subject_id = fields[0];
    rec.indicator_id = fields[1];
    rec.score = parse_number(fields[2], line_no, "score");
    rec.weight = parse_number(fields[3], line_no, "weight");
    if (rec.subject_id.empty() || rec.indicator_id.empty()) {
      throw DataError("empty id at line " + std::to_string(line_no));
    }
    if (!std::isfinite(rec.score)) {
      throw DataError("non-finite score at line " + std::to_string(line_no));
    }
    if (rec.weight < 0.0 || !std::isfinite(rec.weight)) {
      throw DataError("negative or non-finite weight at line " +
                      std::to_string(line_no));
    }

    auto [sit, s_new] = subject_index.try_emplace(
        rec.subject_id, static_cast<Index>(subject_ids.size()));
    if (s_new) subject_ids.push_back(rec.subject_id);
    auto [iit, i_new] = indicator_index.try_emplace(
        rec.indicator_id, static_cast<Index>(indicator_names.size()));
    if (i_new) indicator_names.push_back(rec.indicator_id);

    const auto key = std::make_pair(iit->second, sit->second);
    const auto [dit, fresh] = seen.try_emplace(key, line_no);
    if (!fresh) {
      throw DataError("duplicate (" + rec.subject_id + ", " +
                      rec.indicator_id + ") at lines " +
                      std::to_string(dit->second) + " and " +
                      std::to_string(line_no));
    }
    records.push_back(std::move(rec));
    record_lines.push_back(line_no);
  }
  if (records.empty()) throw DataError("no data rows in " + path);

  const Index m = static_cast<Index>(indicator_names.size());
  const Index H = static_cast<Index>(subject_ids.size());
  LoadedPanel out;
  out.panel.scores = Matrix::Zero(m, H);
  out.panel.observed = BoolMask::Constant(m, H, false);
  out.panel.indicator_names = std::move(indicator_names);
  out.panel.subject_ids = std::move(subject_ids);
  out.weights.weights = Matrix::Zero(m, H);

  for (const RawPanelRecord& rec : records) {
    const Index j = indicator_index.at(rec.indicator_id);
    const Index h = subject_index.at(rec.subject_id);
    if (rec.weight == 0.0) continue;  // equivalent to an absent row
    out.panel.scores(j, h) = rec.score;
    out.panel.observed(j, h) = true;
    out.weights.weights(j, h) = rec.weight;
  }
  out.panel.validate();
  return out;
}

void save_long_csv(const IndicatorPanel& panel, const WeightMatrix& weights,
                   const std::string& path) {
  weights.validate_against(panel);
  std::ofstream outf(path);
  if (!outf) throw DataError("cannot open output file: " + path);
  outf << "subject_id,indicator_id,score,weight\n";
  for (Index h = 0; h < panel.num_subjects(); ++h) {
    for (Index j = 0; j < panel.num_indicators(); ++j) {
      if (!panel.observed(j, h)) continue;
      outf << panel.subject_ids[static_cast<size_t>(h)] << ','
           << panel.indicator_names[static_cast<size_t>(j)] << ','
           << format_double(panel.scores(j, h)) << ','
           << format_double(weights.weights(j, h)) << '\n';
    }
  }
}

std::pair<IndicatorPanel, Standardization> standardize_indicators(
    const IndicatorPanel& panel) {
  panel.validate();
  const Index m = panel.num_indicators();
  const Index H = panel.num_subjects();

  Standardization transform;
  transform.mean.resize(m);
  transform.sd.resize(m);

  IndicatorPanel out = panel;
  for (Index j = 0; j < m; ++j) {
    long double sum = 0.0L;
    Index n = 0;
    for (Index h = 0; h < H; ++h) {
      if (!panel.observed(j, h)) continue;
      sum += panel.scores(j, h);
      ++n;
    }
    if (n < 2) {
      throw DegenerateIndicator("indicator " + panel.indicator_names[j] +
                                " has fewer than two observed values");
    }
    const double mean = static_cast<double>(sum / n);
    long double ss = 0.0L;
    for (Index h = 0; h < H; ++h) {
      if (!panel.observed(j, h)) continue;
      const double d = panel.scores(j, h) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(static_cast<double>(ss / (n - 1)));
    if (!(sd > 0.0)) {
      throw DegenerateIndicator("indicator " + panel.indicator_names[j] +
                                " has zero variance");
    }
    transform.mean[j] = mean;
    transform.sd[j] = sd;
    for (Index h = 0; h < H; ++h) {
      out.scores(j, h) =
          panel.observed(j, h) ? (panel.scores(j, h) - mean) / sd : 0.0;
    }
  }
  return {std::move(out), std::move(transform)};
}

std::string format_double(double value) {
  char buffer[40];
  // Shortest representation that parses back to the same bits.
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
    if (std::strtod(buffer, nullptr) == value) break;
  }
  return buffer;
}

}  // namespace wlvm
