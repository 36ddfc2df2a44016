#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "nndlab/crs.hpp"
#include "nndlab/error.hpp"
#include "nndlab/io.hpp"
#include "nndlab/nnd.hpp"
#include "nndlab/twonrq.hpp"

using namespace nndlab;

TEST(Csv, FieldQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, DoublesRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 2.8e-6, 1e300, -0.0}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(Knn, CsvRoundTripSkipsConfigComment) {
  const KnnGraph g = init_random_kout(50, 4, 1).to_graph();
  std::stringstream buf;
  write_config_comment(buf, Json{{"n", 50}, {"note", "a,b"}});
  write_knn_csv(buf, g);
  EXPECT_EQ(buf.str().substr(0, 2), "# ");
  EXPECT_EQ(read_knn_csv(buf), g);
}

TEST(Knn, JsonRoundTrip) {
  const KnnGraph g = init_random_kout(20, 3, 2).to_graph();
  EXPECT_EQ(knn_from_json(knn_to_json(g)), g);
  EXPECT_EQ(knn_from_json(Json::parse(knn_to_json(g).dump())), g);
}

TEST(Knn, RejectsMalformedCsv) {
  std::stringstream bad("source,rank,target\n0,1,1\n");
  EXPECT_THROW(read_knn_csv(bad), InputError);
}

TEST(Orders, CsvRoundTrip) {
  const LinearOrder o = random_linear_order(7, 4);
  std::stringstream buf;
  write_order_csv(buf, o);
  std::string header;
  std::getline(buf, header);
  EXPECT_EQ(header, "sigma,pair_id,lo,hi");
  buf.seekg(0);
  EXPECT_EQ(read_order_csv(buf, 7), o);
}

TEST(RankTables, CsvRoundTrip) {
  const RankTable t = generic_crs(6, 3).table;
  std::stringstream buf;
  write_rank_table_csv(buf, t);
  EXPECT_EQ(read_rank_table_csv(buf), t);
}

TEST(Schedule, CsvHeaderAndFormulaColumn) {
  const Schedule s = compute_schedule(derive_params(1e7, 28, 4, 0.5));
  std::stringstream buf;
  write_schedule_csv(buf, s);
  std::string line;
  std::getline(buf, line);
  EXPECT_EQ(line, "t,r_t,theta_t,formula_used");
  std::getline(buf, line);
  EXPECT_EQ(line.substr(0, 4), "0,1,");
  EXPECT_NE(line.find("initial"), std::string::npos);
  std::getline(buf, line);
  EXPECT_NE(line.find("explicit"), std::string::npos);
  const Json j = schedule_to_json(s);
  EXPECT_EQ(j["tau"], 8);
}

TEST(Reports, CertificateJson) {
  const Json ok = certificate_to_json(concordancy_check(concordant5_table()));
  EXPECT_TRUE(ok["concordant"].get<bool>());
  const Json bad = certificate_to_json(concordancy_check(RankTable::from_orders({{1, 2}, {2, 0}, {0, 1}})));
  EXPECT_FALSE(bad["concordant"].get<bool>());
}
