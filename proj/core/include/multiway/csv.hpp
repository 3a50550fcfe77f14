#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "multiway/anova.hpp"

namespace multiway {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180-style reader: comma separated, double-quote quoting with ""
/// escapes, CRLF or LF line endings, header row required. Throws
/// validation_error with a row number on malformed input.
CsvTable read_csv(std::istream& in);

struct IngestResult {
  Dataset dataset;
  /// Distinct level strings per factor, in first-appearance order; level i of
  /// factor j in the Dataset corresponds to level_names[j][i].
  std::vector<std::vector<std::string>> level_names;
};

/// Builds a balanced Dataset from long-format CSV: factor columns are
/// categorical (levels assigned in first-appearance order), the response
/// column numeric. Throws validation_error for missing columns, non-numeric
/// responses (with the row number), empty cells, or unbalanced cell counts
/// (naming the offending cells).
IngestResult ingest_csv(std::istream& in, std::string_view response_column,
                        std::span<const std::string> factor_columns);
IngestResult ingest_csv(const std::filesystem::path& path, std::string_view response_column,
                        std::span<const std::string> factor_columns);

}  // namespace multiway
