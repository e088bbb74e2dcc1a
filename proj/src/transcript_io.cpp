#include "tmcc/transcript_io.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace tmcc {

namespace {

using ordered_json = nlohmann::ordered_json;

// Round-trips through the 12-digit text so JSON prints the same digits.
double rounded(double value) {
  const std::string text = format_real(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string cell_text(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const { return csv_escape(v); }
  };
  return std::visit(Visitor{}, cell);
}

ordered_json cell_json(const Cell& cell) {
  struct Visitor {
    ordered_json operator()(std::monostate) const { return nullptr; }
    ordered_json operator()(bool v) const { return v; }
    ordered_json operator()(std::int64_t v) const { return v; }
    ordered_json operator()(double v) const { return rounded(v); }
    ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

ordered_json table_json(const Table& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  return rows;
}

ordered_json summary_json(const Summary& summary) {
  ordered_json obj = ordered_json::object();
  for (const auto& [field, value] : summary) obj[field] = cell_json(value);
  return obj;
}

void add_detection(Summary& s, const std::string& party, const std::optional<DetectionReport>& report) {
  if (!report) {
    s.emplace_back(party + "_test", std::string("skipped"));
    s.emplace_back(party + "_test_statistic", std::monostate{});
    s.emplace_back(party + "_test_dof", std::monostate{});
    s.emplace_back(party + "_test_p_value", std::monostate{});
    return;
  }
  s.emplace_back(party + "_test", std::string(report->passed ? "passed" : "rejected"));
  s.emplace_back(party + "_test_statistic", report->statistic);
  s.emplace_back(party + "_test_dof", std::int64_t{report->degrees_of_freedom});
  s.emplace_back(party + "_test_p_value", report->p_value);
}

}  // namespace

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + text + "' (expected csv or json)");
}

std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

void write_table(std::ostream& out, const Table& table, OutputFormat format) {
  if (format == OutputFormat::json) {
    out << table_json(table).dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

void write_summary(std::ostream& out, const Summary& summary, OutputFormat format) {
  if (format == OutputFormat::json) {
    out << summary_json(summary).dump(2) << '\n';
    return;
  }
  out << "field,value\n";
  for (const auto& [field, value] : summary) out << field << ',' << cell_text(value) << '\n';
}

std::string to_hex(const SessionId& id) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (auto b : id) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

Table transcript_table(const SessionTranscript& transcript) {
  Table table;
  table.columns = kTranscriptColumns;
  table.rows.reserve(transcript.records.size());
  for (const auto& r : transcript.records) {
    table.rows.push_back({static_cast<std::int64_t>(r.index), std::int64_t{r.counts.base_count},
                          std::int64_t{r.counts.alice_count}, std::int64_t{r.counts.bob_count},
                          std::int64_t{r.alice_bit}, std::int64_t{r.bob_bit}});
  }
  return table;
}

Summary transcript_summary(const SessionTranscript& t) {
  const auto& c = t.config;
  Summary s;
  s.emplace_back("session_id", to_hex(t.session_id));
  s.emplace_back("lambda", c.lambda.magnitude());
  s.emplace_back("epsilon", c.epsilon);
  s.emplace_back("key_bits", static_cast<std::int64_t>(c.key_bits));
  s.emplace_back("seed", std::to_string(c.seed));
  s.emplace_back("attack", c.attack.describe());
  s.emplace_back("significance", c.detection_significance);
  s.emplace_back("mean_photons", mean_photons(c.lambda));
  s.emplace_back("threshold", std::int64_t{t.threshold});
  s.emplace_back("outcome", std::string(t.outcome.accepted ? "accepted" : "aborted"));
  s.emplace_back("abort_reason", t.outcome.reason ? Cell(to_string(*t.outcome.reason)) : Cell());
  s.emplace_back("detail", t.outcome.detail);
  if (t.verification) {
    s.emplace_back("verification", std::string(t.verification->match ? "match" : "mismatch"));
    s.emplace_back("differing_count", static_cast<std::int64_t>(t.verification->differing_count));
  } else {
    s.emplace_back("verification", std::string("not-run"));
    s.emplace_back("differing_count", std::monostate{});
  }
  add_detection(s, "alice", t.alice_detection);
  add_detection(s, "bob", t.bob_detection);

  std::size_t mismatched = 0;
  for (const auto& r : t.records) mismatched += r.alice_bit != r.bob_bit;
  const double n = static_cast<double>(t.records.size());
  s.emplace_back("mismatched_bits", static_cast<std::int64_t>(mismatched));
  s.emplace_back("observed_mismatch_rate", n > 0 ? mismatched / n : 0.0);
  s.emplace_back("predicted_mismatch_rate", mismatch_rate(c.lambda, c.epsilon));
  s.emplace_back("error_probability_first_order", error_probability(c.lambda, c.epsilon));
  s.emplace_back("alice_key", to_string(t.alice_key));
  s.emplace_back("bob_key", to_string(t.bob_key));
  return s;
}

void write_transcript(std::ostream& out, const SessionTranscript& transcript, OutputFormat format) {
  if (format == OutputFormat::csv) {
    write_table(out, transcript_table(transcript), OutputFormat::csv);
    return;
  }
  ordered_json doc = ordered_json::object();
  doc["summary"] = summary_json(transcript_summary(transcript));
  doc["records"] = table_json(transcript_table(transcript));
  out << doc.dump(2) << '\n';
}

}  // namespace tmcc
