#include "svg_plot.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ksc/format.hpp"

namespace ksc::cli {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 590.0;   // legend occupies the remaining band
constexpr double kTop = 44.0;
constexpr double kBottom = 420.0;

std::string num(double v) { return fmt_double(v, 6); }

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

class Mapper {
 public:
  Mapper(const AxisSpec& axis, double lo, double hi)
      : min_(axis.min), span_(axis.max - axis.min), lo_(lo), hi_(hi) {
    if (!(span_ > 0.0))
      throw std::invalid_argument("svg plot: axis must have positive span");
  }

  double operator()(double v) const {
    return lo_ + (v - min_) / span_ * (hi_ - lo_);
  }

 private:
  double min_;
  double span_;
  double lo_;
  double hi_;
};

}  // namespace

std::string render_line_plot(const std::string& title,
                             const std::vector<SvgSeries>& series,
                             const AxisSpec& x_axis, const AxisSpec& y_axis) {
  const Mapper mx(x_axis, kLeft, kRight);
  const Mapper my(y_axis, kBottom, kTop);  // y grows upward

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth)
      << " " << num(kHeight) << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << num((kLeft + kRight) / 2) << "\" y=\"24\" "
      << "font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">"
      << escape(title) << "</text>\n";

  // frame
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(kRight - kLeft) << "\" height=\"" << num(kBottom - kTop)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (const auto& [value, label] : x_axis.ticks) {
    const double px = mx(value);
    svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(kBottom) << "\" x2=\""
        << num(px) << "\" y2=\"" << num(kBottom + 6)
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num(px) << "\" y=\"" << num(kBottom + 22)
        << "\" font-family=\"sans-serif\" font-size=\"12\" "
        << "text-anchor=\"middle\">" << escape(label) << "</text>\n";
  }
  for (const auto& [value, label] : y_axis.ticks) {
    const double py = my(value);
    svg << "<line x1=\"" << num(kLeft - 6) << "\" y1=\"" << num(py)
        << "\" x2=\"" << num(kLeft) << "\" y2=\"" << num(py)
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py) << "\" x2=\""
        << num(kRight) << "\" y2=\"" << num(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num(kLeft - 10) << "\" y=\"" << num(py + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\" "
        << "text-anchor=\"end\">" << escape(label) << "</text>\n";
  }

  svg << "<text x=\"" << num((kLeft + kRight) / 2) << "\" y=\""
      << num(kHeight - 14)
      << "\" font-family=\"sans-serif\" font-size=\"14\" "
      << "text-anchor=\"middle\">" << escape(x_axis.label) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << num((kTop + kBottom) / 2)
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 20 " << num((kTop + kBottom) / 2) << ")\">"
      << escape(y_axis.label) << "</text>\n";

  for (const auto& s : series) {
    if (s.y.size() != s.x.size())
      throw std::invalid_argument("svg plot: series size mismatch");
    const bool whiskers = !s.y_lo.empty();
    if (whiskers && (s.y_lo.size() != s.x.size() || s.y_hi.size() != s.x.size()))
      throw std::invalid_argument("svg plot: whisker size mismatch");

    if (whiskers) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double px = mx(s.x[i]);
        const double lo = my(s.y_lo[i]);
        const double hi = my(s.y_hi[i]);
        svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(lo) << "\" x2=\""
            << num(px) << "\" y2=\"" << num(hi) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"1\"/>\n";
        for (double py : {lo, hi})
          svg << "<line x1=\"" << num(px - 4) << "\" y1=\"" << num(py)
              << "\" x2=\"" << num(px + 4) << "\" y2=\"" << num(py)
              << "\" stroke=\"" << s.color << "\" stroke-width=\"1\"/>\n";
      }
    }

    svg << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) svg << " ";
      svg << num(mx(s.x[i])) << "," << num(my(s.y[i]));
    }
    svg << "\"/>\n";

    for (std::size_t i = 0; i < s.x.size(); ++i)
      svg << "<circle cx=\"" << num(mx(s.x[i])) << "\" cy=\""
          << num(my(s.y[i])) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
  }

  double legend_y = kTop + 10;
  for (const auto& s : series) {
    svg << "<line x1=\"" << num(kRight + 14) << "\" y1=\"" << num(legend_y)
        << "\" x2=\"" << num(kRight + 40) << "\" y2=\"" << num(legend_y)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(kRight + 46) << "\" y=\"" << num(legend_y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.name)
        << "</text>\n";
    legend_y += 20;
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_line_plot(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series,
                     const AxisSpec& x_axis, const AxisSpec& y_axis) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("svg plot: cannot open " + path);
  out << render_line_plot(title, series, x_axis, y_axis);
  if (!out) throw std::runtime_error("svg plot: write failed for " + path);
}

}  // namespace ksc::cli
