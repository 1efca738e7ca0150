#include "bosonlab/lab/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "bosonlab/common.hpp"

namespace bosonlab::lab {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-300 + 1e-12 * std::abs(hi)) {
      const double w = std::abs(hi) > 0 ? 0.05 * std::abs(hi) : 1.0;
      lo -= w;
      hi += w;
    }
  }
};

double metric(const SweepRow& r, const std::string& name) {
  if (name == "trace_distance") return r.trace_distance;
  if (name == "sobolev_k1") return r.sobolev_k1;
  if (name == "sobolev_k2") return r.sobolev_k2;
  if (name == "hminus") return r.hminus;
  if (name == "rho_to_factorized") return r.rho_to_factorized;
  if (name == "bbgky_residual_max") return r.bbgky_residual_max;
  if (name == "gp_residual_max") return r.gp_residual_max;
  throw PreconditionError("unknown metric " + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << text;
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.pad();
  yr.pad();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0, yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    o << "<line x1=\"" << px(xv) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(xv) << "\" y2=\"" << kTop + ph + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << fmt(xv)
      << "</text>\n";
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << kLeft << "\" y2=\"" << py(yv)
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv)
      << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % std::size(kColors)];
    std::ostringstream pts;
    for (std::size_t p = 0; p < s.x.size() && p < s.y.size(); ++p)
      if (std::isfinite(s.x[p]) && std::isfinite(s.y[p])) pts << px(s.x[p]) << "," << py(s.y[p]) << " ";
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
      << "\"/>\n";
    for (std::size_t p = 0; p < s.x.size() && p < s.y.size(); ++p)
      if (std::isfinite(s.x[p]) && std::isfinite(s.y[p]))
        o << "<circle cx=\"" << px(s.x[p]) << "\" cy=\"" << py(s.y[p]) << "\" r=\"2.5\" fill=\"" << color
          << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(i);
    o << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 32 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

const std::vector<std::string>& plotted_metrics() {
  static const std::vector<std::string> m{"trace_distance", "sobolev_k1",         "sobolev_k2",     "hminus",
                                          "rho_to_factorized", "bbgky_residual_max", "gp_residual_max"};
  return m;
}

std::vector<std::filesystem::path> write_sweep_plots(const SweepReport& report, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  if (report.rows.empty()) return written;
  std::filesystem::create_directories(dir);
  const auto ns = report.particle_counts();
  const double t_final = report.times().back();
  for (const auto& name : plotted_metrics()) {
    Series vs_n{"t = " + fmt(t_final), {}, {}};
    std::vector<Series> vs_t;
    for (int n : ns) {
      Series s{"N = " + std::to_string(n), {}, {}};
      for (const auto& r : report.rows) {
        if (r.n != n) continue;
        s.x.push_back(r.t);
        s.y.push_back(metric(r, name));
        if (std::abs(r.t - t_final) < 1e-9) {
          vs_n.x.push_back(n);
          vs_n.y.push_back(metric(r, name));
        }
      }
      vs_t.push_back(std::move(s));
    }
    const auto p_n = dir / (name + "_vs_N.svg");
    write_text(p_n, line_plot_svg(name + " at t = " + fmt(t_final), "N", name, {vs_n}));
    written.push_back(p_n);
    const auto p_t = dir / (name + "_vs_t.svg");
    write_text(p_t, line_plot_svg(name + " against t", "t", name, vs_t));
    written.push_back(p_t);
  }
  return written;
}

}  // namespace bosonlab::lab
