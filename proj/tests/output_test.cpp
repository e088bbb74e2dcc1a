#include "tmcc/transcript_io.hpp"

#include <gtest/gtest.h>

#include <clocale>
#include <sstream>

#include <json.hpp>

#include "tmcc/session.hpp"

namespace tmcc {
namespace {

TEST(FormatRealTest, TwelveSignificantDigits) {
  EXPECT_EQ(format_real(0.0), "0");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(0.43867627983704874), "0.438676279837");
  EXPECT_EQ(format_real(1234567.891234567), "1234567.89123");
  EXPECT_EQ(format_real(2.5e-20), "2.5e-20");
}

TEST(FormatRealTest, IgnoresLocale) {
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") == nullptr) GTEST_SKIP() << "locale not installed";
  EXPECT_EQ(format_real(0.5), "0.5");
  std::setlocale(LC_NUMERIC, "C");
}

TEST(TableTest, CsvAndJson) {
  Table t;
  t.columns = {"n", "p", "label"};
  t.rows.push_back({std::int64_t{0}, 0.25, std::string("a,b")});
  t.rows.push_back({std::int64_t{1}, std::monostate{}, std::string("c")});
  std::ostringstream csv;
  write_table(csv, t, OutputFormat::csv);
  EXPECT_EQ(csv.str(), "n,p,label\n0,0.25,\"a,b\"\n1,,c\n");

  std::ostringstream js;
  write_table(js, t, OutputFormat::json);
  const auto doc = nlohmann::json::parse(js.str());
  ASSERT_EQ(doc.size(), 2u);
  EXPECT_EQ(doc[0]["p"], 0.25);
  EXPECT_TRUE(doc[1]["p"].is_null());
  EXPECT_EQ(doc[0]["label"], "a,b");
}

TEST(TranscriptTest, ColumnsAndSummaryFields) {
  SessionConfig config;
  config.key_bits = 128;
  config.seed = 3;
  const auto t = run_session(config);

  std::ostringstream csv;
  write_transcript(csv, t, OutputFormat::csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "index,base_count,alice_count,bob_count,alice_bit,bob_bit");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 128u);

  std::ostringstream js;
  write_transcript(js, t, OutputFormat::json);
  const auto doc = nlohmann::json::parse(js.str());
  EXPECT_EQ(doc["records"].size(), 128u);
  const auto& s = doc["summary"];
  EXPECT_EQ(s["outcome"], "accepted");
  EXPECT_EQ(s["verification"], "match");
  EXPECT_EQ(s["key_bits"], 128);
  EXPECT_EQ(s["alice_key"], s["bob_key"]);
  EXPECT_EQ(s["session_id"].get<std::string>().size(), 32u);
  EXPECT_TRUE(s.contains("predicted_mismatch_rate"));
  EXPECT_TRUE(s.contains("error_probability_first_order"));
}

TEST(OutputFormatTest, Parse) {
  EXPECT_EQ(parse_output_format("csv"), OutputFormat::csv);
  EXPECT_EQ(parse_output_format("json"), OutputFormat::json);
  EXPECT_THROW(parse_output_format("xml"), std::invalid_argument);
}

}  // namespace
}  // namespace tmcc
