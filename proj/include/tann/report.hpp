#pragma once

// Deterministic text artifacts: CSV traces, metrics rows, SVG line plots,
// and atomic file output.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tann/train.hpp"

namespace tann {

/// Shortest decimal that reads back to the same double.
std::string format_real(double v);

/// Writes through a sibling temp file, then renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill);
void write_text_atomically(const std::filesystem::path& path, const std::string& text);

inline constexpr const char* kTraceHeader = "epoch,mean_loss,last_loss";
inline constexpr const char* kMetricsHeader = "model,config,depth,final_loss,accuracy,weighted_f1";

std::string trace_csv(const std::vector<train::EpochRecord>& epochs);

struct TracePoint {
  std::size_t epoch = 0;
  double mean_loss = 0;
  double last_loss = 0;
};

/// Parses a trace CSV; throws FormatError on a wrong header or bad row.
std::vector<TracePoint> parse_trace_csv(const std::string& text);

struct MetricsRow {
  std::string model;
  std::string config;
  std::size_t depth = 0;
  double final_loss = 0;
  double accuracy = 0;
  double weighted_f1 = 0;
};

std::string metrics_csv(const std::vector<MetricsRow>& rows);

struct PlotSeries {
  std::string label;
  std::vector<TracePoint> points;
};

/// Standalone SVG with one polyline (mean_loss over epoch) per series.
/// Throws ContractError when there is no series or a series is empty.
std::string loss_plot_svg(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace tann
