#pragma once

// CSV ingestion and emission for length-of-stay records.
//
// Input columns (header names are trimmed and lowercased): gender
// {male, female}, season {spring, summer, autumn, winter}, exactly one of
// age (whole years, >= 1) or age_group (1-5), los (days, > 0) and an
// optional id that is ignored.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "losdoe/model.hpp"

namespace losdoe {

struct IngestOptions {
  /// Derive season from an ISO yyyy-mm-dd date column instead of reading a
  /// season column. Meteorological northern-hemisphere seasons: Mar-May
  /// spring, Jun-Aug summer, Sep-Nov autumn, Dec-Feb winter.
  bool season_from_date = false;
  std::string date_column = "admission_date";
};

/// Parses CSV text into a dataset over los_layout() with response "los".
/// Any bad row aborts with an InputError naming its line number.
Dataset parse_csv(std::string_view text, const IngestOptions& options = {});

/// Reads and parses a file; an unreadable file is an InputError.
Dataset ingest_csv(const std::filesystem::path& path, const IngestOptions& options = {});

/// Season of a yyyy-mm-dd date as named in los_layout().
std::string season_for_date(std::string_view iso_date);

/// Writes gender,season,age_group,los rows; responses use the shortest text
/// that parses back to the same double. Requires a raw-scale dataset over
/// los_layout().
void write_csv(const Dataset& d, std::ostream& out);
void write_csv(const Dataset& d, const std::filesystem::path& path);

}  // namespace losdoe
