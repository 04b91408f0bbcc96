#include "dynpov/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <string_view>

#include "dynpov/error.hpp"

namespace dynpov {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV line. Double-quoted fields may contain commas and "" escapes.
std::optional<std::vector<std::string>> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!trim(cur).empty()) return std::nullopt;
      cur.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(was_quoted ? cur : std::string(trim(cur)));
  return fields;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::vector<std::string> read_header(std::istream& in, const char* what) {
  std::string line;
  if (!next_line(in, line)) {
    throw Error(ErrorKind::ParseError, std::string(what) + ": empty file, header expected");
  }
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  auto fields = split_csv(line);
  if (!fields) throw Error(ErrorKind::ParseError, std::string(what) + ": malformed header");
  return *fields;
}

std::size_t column(const std::vector<std::string>& header, std::string_view name,
                   const char* what) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorKind::ParseError,
                std::string(what) + ": header lacks column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot open '" + path.string() + "'");
  return in;
}

std::optional<int> parse_components(std::string_view s) {
  if (trim(s) == "7+") return kTopComponentsBucket;
  return parse_int(s);
}

}  // namespace

PanelLoad parse_panel(std::istream& in) {
  const auto header = read_header(in, "panel");
  const std::size_t c_id = column(header, "household_id", "panel");
  const std::size_t c_year = column(header, "year", "panel");
  const std::size_t c_comp = column(header, "components", "panel");
  const std::size_t c_inc = column(header, "income", "panel");
  const std::size_t width = header.size();

  PanelLoad out;
  std::set<std::pair<std::string, int>> seen;
  std::string line;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    auto fail = [&](std::string msg) { out.row_errors.push_back({line_no, std::move(msg)}); };
    if (!fields || fields->size() != width) {
      fail("expected " + std::to_string(width) + " fields");
      continue;
    }
    const std::string& id = (*fields)[c_id];
    const auto year = parse_int((*fields)[c_year]);
    const auto comp = parse_components((*fields)[c_comp]);
    const auto income = parse_double((*fields)[c_inc]);
    if (id.empty()) {
      fail("empty household_id");
    } else if (!year) {
      fail("bad year '" + (*fields)[c_year] + "'");
    } else if (!comp || *comp < 1) {
      fail("bad components '" + (*fields)[c_comp] + "'");
    } else if (!income) {
      fail("bad income '" + (*fields)[c_inc] + "'");
    } else if (*income < 0.0) {
      fail("negative income");
    } else if (!seen.emplace(id, *year).second) {
      fail("duplicate household_id/year");
    } else {
      out.records.push_back({id, *year, *comp, *income});
    }
  }
  return out;
}

PanelLoad load_panel(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_panel(in);
}

void ThresholdTable::set(int components, int year, double threshold) {
  if (components < 1) throw Error(ErrorKind::InvalidArgument, "components must be >= 1");
  cells_[{year, components_bucket(components)}] = threshold;
}

bool ThresholdTable::contains(int components, int year) const {
  return components >= 1 && cells_.count({year, components_bucket(components)}) > 0;
}

double ThresholdTable::at(int components, int year) const {
  const auto it = cells_.find({year, components_bucket(components)});
  if (components < 1 || it == cells_.end()) {
    throw Error(ErrorKind::MissingThreshold,
                "no threshold for " + std::to_string(components) + " components in " +
                    std::to_string(year));
  }
  return it->second;
}

std::vector<int> ThresholdTable::years() const {
  std::vector<int> out;
  for (const auto& [key, value] : cells_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

void ThresholdTable::validate() const {
  std::optional<std::pair<int, double>> prev;  // (year, threshold) of the previous bucket
  for (const auto& [key, value] : cells_) {
    if (!std::isfinite(value) || value <= 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "threshold for year " + std::to_string(key.first) + " must be > 0");
    }
    if (prev && prev->first == key.first && !(value > prev->second)) {
      throw Error(ErrorKind::InvalidArgument,
                  "thresholds must increase with components (year " + std::to_string(key.first) +
                      ")");
    }
    prev = {key.first, value};
  }
}

ThresholdTable parse_thresholds(std::istream& in) {
  const auto header = read_header(in, "thresholds");
  const std::size_t c_comp = column(header, "components", "thresholds");
  const std::size_t c_year = column(header, "year", "thresholds");
  const std::size_t c_thr = column(header, "threshold", "thresholds");

  ThresholdTable table;
  std::string line;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw Error(ErrorKind::ParseError, "thresholds line " + std::to_string(line_no) + ": " + msg);
    };
    const auto fields = split_csv(line);
    if (!fields || fields->size() != header.size()) fail("wrong number of fields");
    const std::string_view comp_text = trim((*fields)[c_comp]);
    std::optional<int> comp;
    if (comp_text == "7+") {
      comp = kTopComponentsBucket;
    } else {
      comp = parse_int(comp_text);
      if (comp && (*comp < 1 || *comp >= kTopComponentsBucket)) comp.reset();
    }
    const auto year = parse_int((*fields)[c_year]);
    const auto thr = parse_double((*fields)[c_thr]);
    if (!comp) fail("components must be 1-6 or 7+");
    if (!year) fail("bad year");
    if (!thr) fail("bad threshold");
    if (table.contains(*comp, *year)) fail("duplicate components/year");
    table.set(*comp, *year, *thr);
  }
  try {
    table.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, std::string("thresholds: ") + e.what());
  }
  return table;
}

ThresholdTable load_thresholds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::MissingThreshold, "cannot open threshold table '" + path.string() + "'");
  }
  return parse_thresholds(in);
}

std::vector<StandardizedRecord> standardize(std::span<const PanelRecord> records,
                                            const ThresholdTable& thresholds,
                                            int base_components, int base_year) {
  const double base = thresholds.at(base_components, base_year);
  std::vector<StandardizedRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const double own = thresholds.at(r.components, r.year);
    // Dividing first keeps income == own exact: (own / own) * base == base.
    out.push_back({r.household_id, r.year, r.components, r.income, (r.income / own) * base});
  }
  return out;
}

std::vector<StandardizedRecord> standardize_two_step(std::span<const PanelRecord> records,
                                                     const std::map<int, double>& scale_by_components,
                                                     const std::map<int, double>& index_by_year,
                                                     int base_components, int base_year) {
  auto lookup = [](const std::map<int, double>& m, int key, const char* what) {
    const auto it = m.find(key);
    if (it == m.end() || !(it->second > 0.0)) {
      throw Error(ErrorKind::MissingThreshold,
                  std::string("no positive ") + what + " for " + std::to_string(key));
    }
    return it->second;
  };
  const double base_scale =
      lookup(scale_by_components, components_bucket(base_components), "equivalence scale");
  const double base_index = lookup(index_by_year, base_year, "price index");
  std::vector<StandardizedRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const double scale =
        lookup(scale_by_components, components_bucket(r.components), "equivalence scale");
    const double index = lookup(index_by_year, r.year, "price index");
    const double per_base_household = r.income / scale * base_scale;
    out.push_back({r.household_id, r.year, r.components, r.income,
                   per_base_household / index * base_index});
  }
  return out;
}

double derive_extreme_threshold(double y_p, double fraction) {
  const double y_ep = fraction * y_p;
  PovertyThresholds check(y_ep, y_p);
  return check.y_ep();
}

std::vector<int> wave_years(std::span<const StandardizedRecord> records) {
  std::set<int> years;
  for (const auto& r : records) years.insert(r.year);
  return {years.begin(), years.end()};
}

std::size_t Cohort::wave_index(int year) const {
  const auto it = std::find(waves.begin(), waves.end(), year);
  if (it == waves.end()) {
    throw Error(ErrorKind::InvalidArgument, "year " + std::to_string(year) + " is not a wave");
  }
  return static_cast<std::size_t>(it - waves.begin());
}

CrossSection Cohort::cross_section(std::size_t wave) const {
  if (wave >= waves.size()) throw Error(ErrorKind::InvalidArgument, "wave index out of range");
  CrossSection cs;
  cs.year = waves[wave];
  cs.observations.reserve(households());
  for (std::size_t h = 0; h < households(); ++h) {
    cs.observations.push_back({household_ids[h], incomes[h][wave], classes[h][wave]});
  }
  return cs;
}

Cohort build_cohort(std::span<const StandardizedRecord> records, std::span<const int> waves,
                    const PovertyThresholds& thresholds) {
  if (waves.empty() || !std::is_sorted(waves.begin(), waves.end()) ||
      std::adjacent_find(waves.begin(), waves.end()) != waves.end()) {
    throw Error(ErrorKind::InvalidArgument, "wave years must be nonempty and strictly increasing");
  }
  std::map<std::string, std::vector<std::optional<double>>> by_household;
  for (const auto& r : records) {
    auto& slots = by_household[r.household_id];
    if (slots.empty()) slots.resize(waves.size());
    const auto it = std::lower_bound(waves.begin(), waves.end(), r.year);
    if (it == waves.end() || *it != r.year) continue;
    auto& slot = slots[static_cast<std::size_t>(it - waves.begin())];
    if (slot) {
      throw Error(ErrorKind::InvalidArgument,
                  "household " + r.household_id + " has two records for " + std::to_string(r.year));
    }
    slot = r.income;
  }

  Cohort cohort;
  cohort.waves.assign(waves.begin(), waves.end());
  cohort.thresholds = thresholds;
  for (const auto& [id, slots] : by_household) {
    if (!std::all_of(slots.begin(), slots.end(), [](const auto& s) { return s.has_value(); })) {
      ++cohort.dropped;
      continue;
    }
    std::vector<double> inc;
    std::vector<PovertyClass> cls;
    for (const auto& s : slots) {
      inc.push_back(*s);
      cls.push_back(classify(*s, thresholds));
    }
    cohort.household_ids.push_back(id);
    cohort.incomes.push_back(std::move(inc));
    cohort.classes.push_back(std::move(cls));
  }
  if (cohort.household_ids.empty()) {
    throw Error(ErrorKind::EmptyCohort, "no household is observed at every wave");
  }
  return cohort;
}

std::vector<CrossSection> cross_sections_by_year(std::span<const StandardizedRecord> records,
                                                 const PovertyThresholds& thresholds) {
  std::map<int, CrossSection> by_year;
  for (const auto& r : records) {
    auto& cs = by_year[r.year];
    cs.year = r.year;
    cs.observations.push_back({r.household_id, r.income, classify(r.income, thresholds)});
  }
  std::vector<CrossSection> out;
  for (auto& [year, cs] : by_year) out.push_back(std::move(cs));
  return out;
}

}  // namespace dynpov
