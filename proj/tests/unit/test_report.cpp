#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tann/errors.hpp"
#include "tann/report.hpp"

using namespace tann;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<train::EpochRecord> records(std::initializer_list<double> means) {
  std::vector<train::EpochRecord> out;
  for (double m : means) {
    train::EpochRecord r;
    r.epoch = out.size() + 1;
    r.mean_loss = m;
    r.last_loss = m / 2;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Trace, RoundTripsExactly) {
  const auto recs = records({0.6931471805599453, 0.1, 1e-300});
  const std::string csv = trace_csv(recs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kTraceHeader);
  const auto points = parse_trace_csv(csv);
  ASSERT_EQ(points.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(points[i].epoch, i + 1);
    EXPECT_EQ(points[i].mean_loss, recs[i].mean_loss);
    EXPECT_EQ(points[i].last_loss, recs[i].last_loss);
  }
}

TEST(Trace, BadInput) {
  EXPECT_THROW(parse_trace_csv("epoch,loss\n1,2\n"), FormatError);
  EXPECT_THROW(parse_trace_csv(std::string(kTraceHeader) + "\n1,abc,2\n"), FormatError);
}

TEST(Metrics, HeaderIsExact) {
  const std::string csv = metrics_csv({{"tann", "xor", 3, 0.25, 1.0, 1.0}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,config,depth,final_loss,accuracy,weighted_f1");
  EXPECT_NE(csv.find("tann,xor,3,0.25,1,1"), std::string::npos) << csv;
}

TEST(Plot, OnePolylinePerSeriesAndDeterministic) {
  const auto a = parse_trace_csv(trace_csv(records({0.7, 0.5, 0.2})));
  const auto b = parse_trace_csv(trace_csv(records({0.7, 0.6, 0.55})));
  const std::vector<PlotSeries> series = {{"tann", a}, {"single", b}};
  const std::string svg = loss_plot_svg(series, "xor");
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find("epoch"), std::string::npos);
  EXPECT_NE(svg.find("mean_loss"), std::string::npos);
  EXPECT_EQ(svg, loss_plot_svg(series, "xor"));
  EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true);
}

TEST(Plot, SinglePointAndErrors) {
  const auto one = parse_trace_csv(trace_csv(records({0.4})));
  EXPECT_EQ(count(loss_plot_svg({{"one", one}}, "t"), "<polyline"), 1u);
  EXPECT_THROW(loss_plot_svg({}, "t"), ContractError);
  EXPECT_THROW(loss_plot_svg({{"empty", {}}}, "t"), ContractError);
}

TEST(Atomic, ReplacesWithoutTempLeftovers) {
  const auto dir = std::filesystem::temp_directory_path() / "tann_report_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / "out.txt";
  write_text_atomically(p, "first");
  write_text_atomically(p, "second");
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second");
  EXPECT_FALSE(std::filesystem::exists(p.string() + ".tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.25), "0.25");
  EXPECT_EQ(std::stod(format_real(0.1)), 0.1);
}
