#include "tclf/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tclf/errors.hpp"
#include "tclf/linalg.hpp"

namespace tclf::io {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

double parse_field(const std::string& field, const std::string& path,
                   std::size_t data_row, const char* column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(path + ": row " + std::to_string(data_row) +
                     ": cannot parse " + column + " field '" + field + "'");
  if (!std::isfinite(value))
    throw ParseError(path + ": row " + std::to_string(data_row) +
                     ": non-finite " + column + " value");
  return value;
}

struct TwoColumnFile {
  std::vector<double> t;
  std::vector<double> v;
};

// Shared reader for t,value-shaped files; `value_col` picks the extracted
// column, extra columns (the forecast export's observation) are ignored.
TwoColumnFile read_columns(const std::string& path,
                           const std::vector<std::string>& accepted_headers,
                           std::size_t value_col) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path + ": empty file, expected header '" + accepted_headers[0] + "'");
  line = strip_cr(line);
  if (std::find(accepted_headers.begin(), accepted_headers.end(), line) ==
      accepted_headers.end())
    throw ParseError(path + ": bad header '" + line + "', expected '" +
                     accepted_headers[0] + "'");

  TwoColumnFile out;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    ++data_row;
    const auto fields = split_fields(line);
    if (fields.size() <= value_col)
      throw ParseError(path + ": row " + std::to_string(data_row) +
                       ": expected at least " + std::to_string(value_col + 1) +
                       " columns");
    out.t.push_back(parse_field(fields[0], path, data_row, "t"));
    out.v.push_back(parse_field(fields[value_col], path, data_row, "value"));
  }
  return out;
}

TimeSeries to_series(const TwoColumnFile& cols, const std::string& path) {
  if (cols.t.size() < 2)
    throw ParseError(path + ": need at least 2 data rows to infer the step");
  const double step = cols.t[1] - cols.t[0];
  if (!(step > 0.0))
    throw ParseError(path + ": row 2: t must be strictly increasing");
  for (std::size_t k = 2; k < cols.t.size(); ++k) {
    const double d = cols.t[k] - cols.t[k - 1];
    if (std::abs(d - step) > 1e-6 * std::abs(step))
      throw ParseError(path + ": row " + std::to_string(k + 1) +
                       ": non-constant spacing (" + format_double(d) +
                       " vs step " + format_double(step) + ")");
  }
  TimeSeries s;
  s.step_s = step;
  s.start_s = cols.t[0];
  s.values = cols.v;
  return s;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed2(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

TimeSeries read_series_csv(const std::string& path) {
  return to_series(read_columns(path, {"t,value"}, 1), path);
}

void write_series_csv(const TimeSeries& series, const std::string& path) {
  series.validate();
  auto out = open_for_write(path);
  out << "t,value\n";
  for (std::size_t k = 0; k < series.size(); ++k)
    out << format_double(series.time_at(k)) << ',' << format_double(series.values[k])
        << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

TimeSeries read_prediction_csv(const std::string& path) {
  return to_series(
      read_columns(path, {"t,value", "t,prediction,observation", "t,prediction"}, 1),
      path);
}

void write_trace_csv(const thermal::SimulationTrace& trace, const std::string& path) {
  auto out = open_for_write(path);
  out << "t,indoor_temp,heater_power,relay,t_ext,q_other,solar\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& d = trace.disturbances[k];
    out << format_double(trace.times[k]) << ',' << format_double(trace.indoor_temp[k])
        << ',' << format_double(trace.heater_power[k]) << ','
        << (trace.relay[k] == thermal::RelayCommand::On ? '1' : '0') << ','
        << format_double(d.t_ext) << ',' << format_double(d.q_other) << ','
        << format_double(d.solar) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_forecast_csv(double step_s, double start_s,
                        const std::vector<double>& predictions,
                        const std::vector<double>& observations,
                        const std::string& path) {
  auto out = open_for_write(path);
  out << "t,prediction,observation\n";
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    out << format_double(start_s + static_cast<double>(k) * step_s) << ','
        << format_double(predictions[k]) << ',';
    if (k < observations.size()) out << format_double(observations[k]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SplitSeries split_series(const TimeSeries& series, std::size_t train_count,
                         std::size_t test_count) {
  series.validate();
  if (train_count == 0 || test_count == 0)
    throw std::invalid_argument("split_series: both parts must be non-empty");
  if (train_count + test_count != series.size())
    throw std::invalid_argument(
        "split_series: counts " + std::to_string(train_count) + "+" +
        std::to_string(test_count) + " do not sum to length " +
        std::to_string(series.size()));

  SplitSeries out;
  out.train.step_s = series.step_s;
  out.train.start_s = series.start_s;
  out.train.values.assign(series.values.begin(),
                          series.values.begin() + static_cast<std::ptrdiff_t>(train_count));
  out.test.step_s = series.step_s;
  out.test.start_s = series.start_s + static_cast<double>(train_count) * series.step_s;
  out.test.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(train_count),
                         series.values.end());
  return out;
}

void SynthLoadConfig::validate() const {
  if (!std::isfinite(base)) throw std::invalid_argument("SynthLoadConfig: non-finite base");
  for (double a : {daily_amplitude, second_harmonic, weekly_amplitude, noise_sd})
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("SynthLoadConfig: amplitudes must be >= 0");
}

TimeSeries synth_load_series(const SynthLoadConfig& cfg, std::uint64_t seed, int days) {
  cfg.validate();
  if (days < 1) throw std::invalid_argument("synth_load_series: days must be >= 1");

  const double two_pi = 2.0 * std::numbers::pi;
  Rng rng(seed);
  TimeSeries out;
  out.step_s = 3600.0;
  out.start_s = 0.0;
  const std::size_t n = static_cast<std::size_t>(days) * 24;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double hod = static_cast<double>(k % 24);
    double v = cfg.base;
    v += cfg.daily_amplitude * std::sin(two_pi * (hod - 12.0) / 24.0);
    v += cfg.second_harmonic * std::sin(2.0 * two_pi * hod / 24.0);
    v += cfg.weekly_amplitude * std::sin(two_pi * static_cast<double>(k) / 168.0);
    v += cfg.noise_sd * rng.normal();
    out.values[k] = v;
  }
  return out;
}

void emit_plot_svg(const std::vector<TimeSeries>& series,
                   const std::vector<std::string>& labels,
                   const std::string& path) {
  if (series.empty()) throw std::invalid_argument("emit_plot_svg: no series");
  if (labels.size() != series.size())
    throw std::invalid_argument("emit_plot_svg: one label per series required");
  for (const auto& s : series)
    if (s.values.empty()) throw std::invalid_argument("emit_plot_svg: empty series");

  constexpr double width = 880, height = 480;
  constexpr double ml = 70, mr = 160, mt = 20, mb = 45;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr std::size_t n_colors = sizeof(palette) / sizeof(palette[0]);

  double xmin = series[0].start_s, xmax = series[0].time_at(series[0].size() - 1);
  double ymin = series[0].values[0], ymax = ymin;
  for (const auto& s : series) {
    xmin = std::min(xmin, s.start_s);
    xmax = std::max(xmax, s.time_at(s.size() - 1));
    for (double v : s.values) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax == ymin) {
    ymin -= 1.0;
    ymax += 1.0;
  } else {
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
  }

  const auto px = [&](double t) { return ml + (t - xmin) / (xmax - xmin) * (width - ml - mr); };
  const auto py = [&](double v) {
    return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  // axes
  svg << "<line x1=\"" << fixed2(ml) << "\" y1=\"" << fixed2(height - mb) << "\" x2=\""
      << fixed2(width - mr) << "\" y2=\"" << fixed2(height - mb)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fixed2(ml) << "\" y1=\"" << fixed2(mt) << "\" x2=\""
      << fixed2(ml) << "\" y2=\"" << fixed2(height - mb) << "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double frac = static_cast<double>(i) / 5.0;
    const double tx = xmin + frac * (xmax - xmin);
    const double x = px(tx);
    svg << "<line x1=\"" << fixed2(x) << "\" y1=\"" << fixed2(height - mb) << "\" x2=\""
        << fixed2(x) << "\" y2=\"" << fixed2(height - mb + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed2(x) << "\" y=\"" << fixed2(height - mb + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(tx)
        << "</text>\n";

    const double vy = ymin + frac * (ymax - ymin);
    const double y = py(vy);
    svg << "<line x1=\"" << fixed2(ml - 5) << "\" y1=\"" << fixed2(y) << "\" x2=\""
        << fixed2(ml) << "\" y2=\"" << fixed2(y) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed2(ml - 8) << "\" y=\"" << fixed2(y + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(vy)
        << "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % n_colors];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < series[s].size(); ++k) {
      if (k) svg << ' ';
      svg << fixed2(px(series[s].time_at(k))) << ',' << fixed2(py(series[s].values[k]));
    }
    svg << "\"/>\n";

    const double ly = mt + 16.0 * static_cast<double>(s) + 8.0;
    svg << "<line x1=\"" << fixed2(width - mr + 10) << "\" y1=\"" << fixed2(ly)
        << "\" x2=\"" << fixed2(width - mr + 30) << "\" y2=\"" << fixed2(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fixed2(width - mr + 36) << "\" y=\"" << fixed2(ly + 4)
        << "\" font-size=\"12\">" << xml_escape(labels[s]) << "</text>\n";
  }
  svg << "</svg>\n";

  auto out = open_for_write(path);
  out << svg.str();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace tclf::io
