#pragma once

// CSV and JSON output shared by the CLI and the bindings. Column names here
// are the stable output contract.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tmcc/protocol.hpp"

namespace tmcc {

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& text);

/// Locale-independent, 12 significant digits.
std::string format_real(double value);

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// CSV with a header line, or a JSON array of row objects.
void write_table(std::ostream& out, const Table& table, OutputFormat format);

/// Ordered (field, value) pairs.
using Summary = std::vector<std::pair<std::string, Cell>>;

/// CSV as "field,value" lines, or one flat JSON object.
void write_summary(std::ostream& out, const Summary& summary, OutputFormat format);

inline const std::vector<std::string> kTranscriptColumns = {
    "index", "base_count", "alice_count", "bob_count", "alice_bit", "bob_bit"};

Table transcript_table(const SessionTranscript& transcript);
Summary transcript_summary(const SessionTranscript& transcript);

/// CSV: the per-bit table. JSON: {"summary": {...}, "records": [...]}.
void write_transcript(std::ostream& out, const SessionTranscript& transcript, OutputFormat format);

std::string to_hex(const SessionId& id);

}  // namespace tmcc
