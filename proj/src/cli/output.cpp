#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "geodyn/cli.hpp"
#include "geodyn/error.hpp"

namespace geodyn {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_kepler_csv(const TrajectoryRecord& rec, std::ostream& out) {
  out << kKeplerCsvHeader << '\n';
  for (const Sample& s : rec.samples) {
    const ConservedSet& c = s.c;
    out << s.step << ',' << format_double(s.t) << ',' << format_double(s.s.x(0)) << ','
        << format_double(s.s.x(1)) << ',' << format_double(s.s.v(0)) << ','
        << format_double(s.s.v(1)) << ',' << format_double(c.H) << ',' << format_double(c.m) << ','
        << format_double(c.A(0)) << ',' << format_double(c.A(1)) << ',' << format_double(c.ecc)
        << ',' << format_double(c.omega) << '\n';
  }
}

void write_relativistic_csv(const std::vector<ExtSample>& samples, std::ostream& out) {
  out << kRelativisticCsvHeader << '\n';
  for (const ExtSample& s : samples) {
    out << s.step << ',' << format_double(s.tau) << ',' << format_double(s.s.t) << ','
        << format_double(s.s.x(0)) << ',' << format_double(s.s.x(1)) << ','
        << format_double(s.s.gamma) << ',' << format_double(s.s.u(0)) << ','
        << format_double(s.s.u(1)) << ',' << format_double(s.H) << '\n';
  }
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fixed2(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double map(double v) const { return log ? std::log10(v) : v; }
  double unit(double v) const { return (map(v) - lo) / (hi - lo); }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(lo); e <= hi + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
      if (out.size() < 2) {
        out = {std::pow(10.0, lo), std::pow(10.0, hi)};
      }
      return out;
    }
    for (int k = 0; k <= 4; ++k) out.push_back(lo + (hi - lo) * k / 4.0);
    return out;
  }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis a;
  a.log = log;
  a.lo = log ? std::log10(lo) : lo;
  a.hi = log ? std::log10(hi) : hi;
  if (a.hi - a.lo < 1e-300 || !(a.hi > a.lo)) {
    const double pad = std::max(std::abs(a.lo) * 0.05, 0.5);
    a.lo -= pad;
    a.hi += pad;
  }
  return a;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const SvgOptions& opt) {
  if (series.empty()) throw InvalidArgumentError("plot needs at least one series");
  std::vector<Series> shown;
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const Series& s : series) {
    Series kept{s.label, {}};
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if ((opt.log_x && !(x > 0.0)) || (opt.log_y && !(y > 0.0))) continue;
      kept.points.emplace_back(x, y);
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
    if (kept.points.size() < 2)
      throw InvalidArgumentError("series '" + s.label + "' needs at least two plottable points");
    shown.push_back(std::move(kept));
  }
  const Axis ax = make_axis(xlo, xhi, opt.log_x);
  const Axis ay = make_axis(ylo, yhi, opt.log_y);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + pw * ax.unit(x); };
  const auto py = [&](double y) { return kTop + ph * (1.0 - ay.unit(y)); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  o << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  o << "<rect x=\"" << fixed2(kLeft) << "\" y=\"" << fixed2(kTop) << "\" width=\"" << fixed2(pw)
    << "\" height=\"" << fixed2(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double t : ax.ticks()) {
    const double x = px(t);
    o << "<line x1=\"" << fixed2(x) << "\" y1=\"" << fixed2(kTop + ph) << "\" x2=\"" << fixed2(x)
      << "\" y2=\"" << fixed2(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed2(x) << "\" y=\"" << fixed2(kTop + ph + 20)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    o << "<line x1=\"" << fixed2(kLeft - 5) << "\" y1=\"" << fixed2(y) << "\" x2=\"" << fixed2(kLeft)
      << "\" y2=\"" << fixed2(y) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed2(kLeft - 8) << "\" y=\"" << fixed2(y + 4)
      << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"400.00\" y=\"30.00\" text-anchor=\"middle\" font-size=\"16\">" << escape(opt.title)
    << "</text>\n";
  o << "<text x=\"" << fixed2(kLeft + pw / 2) << "\" y=\"" << fixed2(kHeight - 20)
    << "\" text-anchor=\"middle\">" << escape(opt.x_label) << "</text>\n";
  o << "<text x=\"20.00\" y=\"" << fixed2(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20.00 "
    << fixed2(kTop + ph / 2) << ")\">" << escape(opt.y_label) << "</text>\n";
  for (std::size_t k = 0; k < shown.size(); ++k) {
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < shown[k].points.size(); ++i) {
      if (i) o << ' ';
      o << fixed2(px(shown[k].points[i].first)) << ',' << fixed2(py(shown[k].points[i].second));
    }
    o << "\"/>\n";
    if (!shown[k].label.empty()) {
      const double ly = kTop + 18.0 + 16.0 * static_cast<double>(k);
      o << "<line x1=\"" << fixed2(kLeft + pw - 150) << "\" y1=\"" << fixed2(ly - 4) << "\" x2=\""
        << fixed2(kLeft + pw - 125) << "\" y2=\"" << fixed2(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
      o << "<text x=\"" << fixed2(kLeft + pw - 120) << "\" y=\"" << fixed2(ly) << "\">"
        << escape(shown[k].label) << "</text>\n";
    }
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

void emit_svg(const std::vector<Series>& series, const std::string& path, const SvgOptions& opt) {
  const std::string doc = render_svg(series, opt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgumentError("cannot open '" + path + "' for writing");
  out << doc;
  if (!out) throw InvalidArgumentError("failed writing '" + path + "'");
}

}  // namespace geodyn
