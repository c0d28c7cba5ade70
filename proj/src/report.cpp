#include "tann/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tann/errors.hpp"

namespace tann {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file_atomically(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    fill(out);
    out.flush();
    if (!out) throw IoError("failed while writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_text_atomically(const fs::path& path, const std::string& text) {
  write_file_atomically(path, [&](std::ostream& out) { out << text; });
}

std::string trace_csv(const std::vector<train::EpochRecord>& epochs) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& rec : epochs) {
    out += std::to_string(rec.epoch) + "," + format_real(rec.mean_loss) + "," + format_real(rec.last_loss) + "\n";
  }
  return out;
}

std::vector<TracePoint> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw FormatError("trace CSV: expected header '" + std::string(kTraceHeader) + "'");
  std::vector<TracePoint> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw FormatError("trace CSV line " + std::to_string(line_no) + ": expected 3 columns");
    try {
      points.push_back(TracePoint{std::stoul(cells[0]), std::stod(cells[1]), std::stod(cells[2])});
    } catch (const std::exception&) {
      throw FormatError("trace CSV line " + std::to_string(line_no) + ": not numeric");
    }
  }
  return points;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : rows) {
    out += r.model + "," + r.config + "," + std::to_string(r.depth) + "," + format_real(r.final_loss) + "," +
           format_real(r.accuracy) + "," + format_real(r.weighted_f1) + "\n";
  }
  return out;
}

std::string loss_plot_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  if (series.empty()) throw ContractError("plot needs at least one trace");
  for (const auto& s : series) {
    if (s.points.empty()) throw ContractError("trace '" + s.label + "' has no epochs");
  }
  constexpr double width = 640, height = 400, left = 70, right = 170, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double max_epoch = 1, lo = series[0].points[0].mean_loss, hi = lo;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      max_epoch = std::max(max_epoch, static_cast<double>(p.epoch));
      lo = std::min(lo, p.mean_loss);
      hi = std::max(hi, p.mean_loss);
    }
  }
  lo = std::min(lo, 0.0);
  if (hi <= lo) hi = lo + 1.0;
  const double min_epoch = 1;
  const double epoch_span = std::max(max_epoch - min_epoch, 1.0);
  auto px = [&](double e) { return left + (e - min_epoch) / epoch_span * plot_w; };
  auto py = [&](double v) { return top + (1.0 - (v - lo) / (hi - lo)) * plot_h; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed(left + plot_w / 2, 1) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         escape_xml(title) + "</text>\n";
  svg += "<line x1=\"" + fixed(left, 1) + "\" y1=\"" + fixed(top + plot_h, 1) + "\" x2=\"" + fixed(left + plot_w, 1) +
         "\" y2=\"" + fixed(top + plot_h, 1) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed(left, 1) + "\" y1=\"" + fixed(top, 1) + "\" x2=\"" + fixed(left, 1) + "\" y2=\"" +
         fixed(top + plot_h, 1) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fixed(left + plot_w / 2, 1) + "\" y=\"" + fixed(height - 12, 1) +
         "\" text-anchor=\"middle\" font-size=\"13\">epoch</text>\n";
  svg += "<text x=\"18\" y=\"" + fixed(top + plot_h / 2, 1) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         fixed(top + plot_h / 2, 1) + ")\">mean_loss</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    svg += "<text x=\"" + fixed(left - 6, 1) + "\" y=\"" + fixed(py(v) + 4, 1) + "\" text-anchor=\"end\" font-size=\"11\">" +
           fixed(v, 3) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(left, 1) + "\" y=\"" + fixed(top + plot_h + 16, 1) +
         "\" text-anchor=\"middle\" font-size=\"11\">1</text>\n";
  svg += "<text x=\"" + fixed(left + plot_w, 1) + "\" y=\"" + fixed(top + plot_h + 16, 1) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + std::to_string(static_cast<long>(max_epoch)) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = colors[i % (sizeof colors / sizeof *colors)];
    std::string pts;
    for (const auto& p : series[i].points) {
      if (!pts.empty()) pts += ' ';
      pts += fixed(px(static_cast<double>(p.epoch)), 2) + "," + fixed(py(p.mean_loss), 2);
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(i) + 6;
    svg += "<text x=\"" + fixed(left + plot_w + 10, 1) + "\" y=\"" + fixed(ly, 1) + "\" font-size=\"11\" fill=\"" +
           color + "\">" + escape_xml(series[i].label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace tann
