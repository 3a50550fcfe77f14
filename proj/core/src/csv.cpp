#include "multiway/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace multiway {

namespace {

// One RFC-4180 record; handles quoted fields, "" escapes, and embedded
// newlines. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;

  std::string field;
  bool in_quotes = false;
  while (true) {
    if (c == EOF) {
      if (in_quotes) {
        throw validation_error("line " + std::to_string(line_no) + ": unterminated quoted field");
      }
      break;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_no;
        field += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++line_no;
      break;
    } else if (ch != '\r') {
      field += ch;
    }
    c = in.get();
  }
  fields.push_back(std::move(field));
  return true;
}

double parse_response(const std::string& text, std::size_t row_no) {
  std::string trimmed = text;
  const auto is_space = [](unsigned char ch) { return std::isspace(ch) != 0; };
  trimmed.erase(trimmed.begin(), std::find_if_not(trimmed.begin(), trimmed.end(), is_space));
  trimmed.erase(std::find_if_not(trimmed.rbegin(), trimmed.rend(), is_space).base(),
                trimmed.end());
  double value = 0.0;
  const char* begin = trimmed.data();
  const char* end = begin + trimmed.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || trimmed.empty()) {
    throw validation_error("row " + std::to_string(row_no) + ": response value '" + text +
                           "' is not numeric");
  }
  return value;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::size_t line_no = 1;
  std::vector<std::string> fields;
  if (!read_record(in, table.header, line_no)) {
    throw validation_error("empty input: a header row is required");
  }
  if (table.header.size() == 1 && table.header[0].empty()) {
    throw validation_error("empty input: a header row is required");
  }
  while (read_record(in, fields, line_no)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw validation_error("row " + std::to_string(table.rows.size() + 2) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
    }
    table.rows.push_back(fields);
  }
  return table;
}

IngestResult ingest_csv(std::istream& in, std::string_view response_column,
                        std::span<const std::string> factor_columns) {
  if (factor_columns.empty()) {
    throw validation_error("at least one factor column is required");
  }
  const CsvTable csv = read_csv(in);

  const auto column_index = [&](std::string_view name) {
    for (std::size_t i = 0; i < csv.header.size(); ++i) {
      if (csv.header[i] == name) return static_cast<int>(i);
    }
    throw validation_error("column '" + std::string(name) + "' not found in header");
  };

  const int response_idx = column_index(response_column);
  std::vector<int> factor_idx;
  for (const std::string& name : factor_columns) {
    if (name == response_column) {
      throw validation_error("column '" + name + "' cannot be both factor and response");
    }
    factor_idx.push_back(column_index(name));
  }

  if (csv.rows.empty()) {
    throw validation_error("no data rows");
  }

  // First pass: levels in first-appearance order.
  const std::size_t k = factor_columns.size();
  std::vector<std::vector<std::string>> level_names(k);
  std::vector<std::map<std::string, int>> level_index(k);
  for (const auto& row : csv.rows) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::string& value = row[static_cast<std::size_t>(factor_idx[j])];
      if (value.empty()) {
        throw validation_error("empty level in factor column '" + factor_columns[j] + "'");
      }
      if (level_index[j].emplace(value, static_cast<int>(level_names[j].size())).second) {
        level_names[j].push_back(value);
      }
    }
  }

  std::int64_t cells = 1;
  for (std::size_t j = 0; j < k; ++j) {
    if (level_names[j].size() < 2) {
      throw validation_error("factor '" + factor_columns[j] + "' has fewer than 2 levels");
    }
    cells *= static_cast<std::int64_t>(level_names[j].size());
  }

  // Second pass: responses and per-cell counts.
  std::vector<Observation> observations;
  observations.reserve(csv.rows.size());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(cells), 0);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    Observation obs;
    obs.cell.resize(k);
    std::int64_t flat = 0;
    for (std::size_t j = 0; j < k; ++j) {
      obs.cell[j] = level_index[j].at(csv.rows[r][static_cast<std::size_t>(factor_idx[j])]);
      flat = flat * static_cast<std::int64_t>(level_names[j].size()) + obs.cell[j];
    }
    obs.y = parse_response(csv.rows[r][static_cast<std::size_t>(response_idx)], r + 2);
    ++counts[static_cast<std::size_t>(flat)];
    observations.push_back(std::move(obs));
  }

  const auto cell_name = [&](std::int64_t flat) {
    std::vector<std::size_t> coord(k);
    for (std::size_t j = k; j-- > 0;) {
      const auto levels = static_cast<std::int64_t>(level_names[j].size());
      coord[j] = static_cast<std::size_t>(flat % levels);
      flat /= levels;
    }
    std::string name = "(";
    for (std::size_t j = 0; j < k; ++j) {
      if (j) name += ",";
      name += factor_columns[j] + "=" + level_names[j][coord[j]];
    }
    return name + ")";
  };

  // Balance: every cell must hold the same number of rows. Report deviations
  // against the most common count.
  std::map<std::int64_t, int> count_freq;
  for (std::int64_t c : counts) ++count_freq[c];
  if (count_freq.size() > 1 || counts[0] == 0) {
    std::int64_t modal = counts[0];
    int best = 0;
    for (const auto& [value, freq] : count_freq) {
      if (freq > best) {
        best = freq;
        modal = value;
      }
    }
    std::ostringstream bad;
    int bad_cells = 0;
    bool missing = false;
    for (std::int64_t c = 0; c < cells; ++c) {
      const std::int64_t count = counts[static_cast<std::size_t>(c)];
      if (count == modal) continue;
      if (count == 0) missing = true;
      if (bad_cells < 5) {
        bad << (bad_cells ? ", " : "") << cell_name(c) << " has " << count;
      }
      ++bad_cells;
    }
    if (missing) {
      throw validation_error("missing cell: " + bad.str() + (bad_cells > 5 ? ", ..." : "") +
                             " observations while other cells hold " + std::to_string(modal));
    }
    throw validation_error("unbalanced design: " + bad.str() + (bad_cells > 5 ? ", ..." : "") +
                           " observations while most cells hold " + std::to_string(modal));
  }
  if (counts[0] < 2) {
    throw validation_error("need at least 2 observations per cell, got " +
                           std::to_string(counts[0]));
  }

  std::vector<Factor> factors;
  for (std::size_t j = 0; j < k; ++j) {
    factors.push_back({factor_columns[j], static_cast<int>(level_names[j].size())});
  }
  Design design(std::move(factors), static_cast<int>(counts[0]));
  return IngestResult{Dataset(std::move(design), observations), std::move(level_names)};
}

IngestResult ingest_csv(const std::filesystem::path& path, std::string_view response_column,
                        std::span<const std::string> factor_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw validation_error("cannot open '" + path.string() + "'");
  }
  return ingest_csv(in, response_column, factor_columns);
}

}  // namespace multiway
