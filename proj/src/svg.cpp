#include "delone/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>

#include "delone/errors.hpp"

namespace delone {

namespace {

// Fixed formatting keeps output byte-stable across runs and platforms.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(double x0, double y0, double w, double h) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w > 0 ? 800 : 0) << "\" height=\""
     << num(w > 0 ? 800 * h / w : 0) << "\" viewBox=\"" << num(x0) << ' ' << num(y0) << ' ' << num(w) << ' '
     << num(h) << "\">\n";
  return os.str();
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string points_svg(const PointSet& set, double marker) {
  if (set.empty()) return header(0, 0, 0, 0) + "</svg>\n";
  const double unit = 1.0 / static_cast<double>(set.denom());
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    double x = static_cast<double>(set[i].x) * unit, y = static_cast<double>(set[i].y) * unit;
    if (i == 0) xmin = xmax = x, ymin = ymax = y;
    xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    ymin = std::min(ymin, y), ymax = std::max(ymax, y);
  }
  xmin -= unit, ymin -= unit, xmax += unit, ymax += unit;
  std::ostringstream os;
  os << header(xmin, -ymax, xmax - xmin, ymax - ymin);
  const double side = marker * unit;
  os << "<g fill=\"#222222\">\n";
  for (auto p : set.numerators()) {
    double x = static_cast<double>(p.x) * unit, y = static_cast<double>(p.y) * unit;
    os << "<rect x=\"" << num(x - side / 2) << "\" y=\"" << num(-y - side / 2) << "\" width=\"" << num(side)
       << "\" height=\"" << num(side) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string series_svg(const std::vector<Series>& series) {
  bool any = false;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      if (!any) xmin = xmax = x, ymin = ymax = y, any = true;
      xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
  }
  if (!any) return header(0, 0, 0, 0) + "</svg>\n";
  // Plot into a fixed 100 x 60 frame so that axes with very different ranges stay visible.
  const double W = 100, H = 60;
  auto sx = [&](double x) { return xmax > xmin ? (x - xmin) / (xmax - xmin) * W : W / 2; };
  auto sy = [&](double y) { return ymax > ymin ? H - (y - ymin) / (ymax - ymin) * H : H / 2; };
  std::ostringstream os;
  os << header(-5, -5, W + 10, H + 10);
  os << "<rect x=\"0\" y=\"0\" width=\"" << num(W) << "\" height=\"" << num(H)
     << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.2\"/>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[k % std::size(kPalette)]
       << "\" stroke-width=\"0.4\" points=\"";
    for (std::size_t i = 0; i < series[k].points.size(); ++i) {
      auto [x, y] = series[k].points[i];
      os << (i ? " " : "") << num(sx(x)) << ',' << num(sy(y));
    }
    os << "\"><title>" << escape(series[k].name) << "</title></polyline>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<Series> read_series_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  auto head = split(line);
  if (head.size() < 2) throw ParseError("CSV needs an x column and at least one series");
  std::vector<Series> out;
  for (std::size_t k = 1; k < head.size(); ++k) out.push_back({head[k], {}});
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    if (cells.size() != head.size()) throw ParseError("CSV row " + std::to_string(row) + " has the wrong width");
    std::vector<double> v;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double d = 0;
      try {
        d = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (c.empty() || used != c.size()) throw ParseError("CSV row " + std::to_string(row) + ": '" + c + "' is not a number");
      v.push_back(d);
    }
    for (std::size_t k = 1; k < v.size(); ++k) out[k - 1].points.emplace_back(v[0], v[k]);
  }
  return out;
}

}  // namespace delone
