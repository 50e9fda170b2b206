#include "losdoe/csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "losdoe/error.hpp"
#include "losdoe/los.hpp"

namespace losdoe {

namespace {

std::string normalize(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  std::string out(s.substr(first, last - first + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Splits one line on commas, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw InputError(fmt::format("line {}: unterminated quoted field", line_no));
  fields.push_back(std::move(cur));
  return fields;
}

[[noreturn]] void row_error(std::size_t line_no, std::string_view message) {
  throw InputError(fmt::format("line {}: {}", line_no, message));
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

int month_of(std::string_view iso_date) {
  if (iso_date.size() < 7 || iso_date[4] != '-') {
    throw InputError(fmt::format("date '{}' is not yyyy-mm-dd", iso_date));
  }
  const auto month = parse_number<int>(iso_date.substr(5, 2));
  if (!month || *month < 1 || *month > 12 || !parse_number<int>(iso_date.substr(0, 4))) {
    throw InputError(fmt::format("date '{}' is not yyyy-mm-dd", iso_date));
  }
  return *month;
}

}  // namespace

std::string season_for_date(std::string_view iso_date) {
  const int m = month_of(normalize(iso_date));
  if (m >= 3 && m <= 5) return "spring";
  if (m >= 6 && m <= 8) return "summer";
  if (m >= 9 && m <= 11) return "autumn";
  return "winter";
}

Dataset parse_csv(std::string_view text, const IngestOptions& options) {
  const auto layout = los_layout();
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  std::size_t header_line = 0;
  while (header_line < lines.size() && normalize(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) throw InputError("CSV input has no header row");

  const auto header = split_fields(lines[header_line], header_line + 1);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (normalize(header[i]) != name) continue;
      if (found) throw InputError(fmt::format("CSV header repeats column '{}'", name));
      found = i;
    }
    return found;
  };
  auto required = [&](std::string_view name) {
    const auto c = column(name);
    if (!c) throw InputError(fmt::format("CSV header lacks required column '{}'", name));
    return *c;
  };

  const auto gender_col = required("gender");
  const auto los_col = required("los");
  const auto age_col = column("age");
  const auto group_col = column("age_group");
  if (age_col && group_col) throw InputError("CSV header has both 'age' and 'age_group'");
  if (!age_col && !group_col) throw InputError("CSV header lacks an 'age' or 'age_group' column");
  const auto season_col =
      options.season_from_date ? required(normalize(options.date_column)) : required("season");

  std::vector<Observation> obs;
  for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (normalize(lines[li]).empty()) continue;
    const auto fields = split_fields(lines[li], line_no);
    if (fields.size() != header.size()) {
      row_error(line_no,
                fmt::format("expected {} fields, found {}", header.size(), fields.size()));
    }

    Observation o;
    o.levels.resize(layout.factor_count());

    const auto gender = normalize(fields[gender_col]);
    const auto g = layout.find_level(kGender, gender);
    if (!g) row_error(line_no, fmt::format("unknown gender '{}'", gender));
    o.levels[kGender] = *g;

    std::string season;
    if (options.season_from_date) {
      try {
        season = season_for_date(fields[season_col]);
      } catch (const InputError& e) {
        row_error(line_no, e.what());
      }
    } else {
      season = normalize(fields[season_col]);
    }
    const auto s = layout.find_level(kSeason, season);
    if (!s) row_error(line_no, fmt::format("unknown season '{}'", season));
    o.levels[kSeason] = *s;

    if (age_col) {
      const auto text = normalize(fields[*age_col]);
      const auto age = parse_number<long>(text);
      if (!age) row_error(line_no, fmt::format("age '{}' is not a whole number", text));
      if (*age < 1) row_error(line_no, fmt::format("age {} is below 1", *age));
      o.levels[kAgeGroup] = age_group_for(*age);
    } else {
      const auto text = normalize(fields[*group_col]);
      const auto a = layout.find_level(kAgeGroup, text);
      if (!a) row_error(line_no, fmt::format("unknown age_group '{}'", text));
      o.levels[kAgeGroup] = *a;
    }

    const auto los_text = normalize(fields[los_col]);
    const auto los = parse_number<double>(los_text);
    if (!los || !std::isfinite(*los)) {
      row_error(line_no, fmt::format("los '{}' is not a number", los_text));
    }
    if (!(*los > 0.0)) row_error(line_no, fmt::format("los {} is not positive", los_text));
    o.response = *los;
    obs.push_back(std::move(o));
  }
  if (obs.empty()) throw InputError("CSV input has no data rows");
  return Dataset(layout, std::move(obs), "los", true, Transform::none);
}

Dataset ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), options);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_csv(const Dataset& d, std::ostream& out) {
  if (!(d.layout() == los_layout())) throw InputError("write_csv: dataset is not over los_layout()");
  if (d.transform() != Transform::none) throw InputError("write_csv: dataset is transformed");
  const auto& layout = d.layout();
  out << "gender,season,age_group,los\n";
  std::array<char, 64> buf{};
  for (const auto& o : d.observations()) {
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), o.response);
    if (ec != std::errc()) throw NumericalError("write_csv: cannot format response");
    out << layout.factor(kGender).levels[o.levels[kGender]] << ','
        << layout.factor(kSeason).levels[o.levels[kSeason]] << ','
        << layout.factor(kAgeGroup).levels[o.levels[kAgeGroup]] << ','
        << std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data())) << '\n';
  }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  write_csv(d, out);
  if (!out) throw InputError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace losdoe
