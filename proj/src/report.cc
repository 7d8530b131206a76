#include "stabkit/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stabkit {

std::string FormatNumber(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string SpectrumCsv(const EigenList& eig) {
  std::ostringstream out;
  out << "re,im,residual\n";
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    const double res = eig.residuals.size() ? eig.residuals(j) : std::nan("");
    out << FormatNumber(eig.values(j).real()) << ',' << FormatNumber(eig.values(j).imag())
        << ',' << FormatNumber(res) << '\n';
  }
  return out.str();
}

std::string ScanCsv(const ResolventScan& scan) {
  std::ostringstream out;
  out << "beta,norm\n";
  for (size_t i = 0; i < scan.betas.size(); ++i) {
    out << FormatNumber(scan.betas[i]) << ',' << FormatNumber(scan.norms[i]) << '\n';
  }
  return out.str();
}

std::string BranchCsv(const std::vector<BranchRow>& rows) {
  std::ostringstream out;
  out << "index,re,im,pred_re,pred_im,rel_err\n";
  for (const auto& r : rows) {
    out << r.index << ',' << FormatNumber(r.beta.real()) << ','
        << FormatNumber(r.beta.imag()) << ',' << FormatNumber(r.pred.real()) << ','
        << FormatNumber(r.pred.imag()) << ',' << FormatNumber(r.rel_err) << '\n';
  }
  return out.str();
}

std::string DecayCsv(const DecayReport& rep) {
  std::ostringstream out;
  out << "t,E,residual\n";
  for (size_t i = 0; i < rep.times.size(); ++i) {
    out << FormatNumber(rep.times[i]) << ',' << FormatNumber(rep.energies[i]) << ','
        << FormatNumber(rep.residuals[i]) << '\n';
  }
  return out.str();
}

nlohmann::json DecaySummary(const DecayReport& rep) {
  nlohmann::json j;
  j["theta"] = std::isnan(rep.theta) ? nlohmann::json(nullptr) : nlohmann::json(rep.theta);
  j["window"] = {rep.t_lo, rep.t_hi};
  j["graph_norm0"] = rep.graph_norm0;
  j["abscissa"] = rep.abscissa;
  j["exponential_regime"] = rep.exponential_regime;
  j["note"] =
      "The truncated system decays exponentially at the spectral abscissa; "
      "polynomial decay is a transient fitted on the calibrated window.";
  return j;
}

std::string LogLogSvg(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& title, const std::string& xlabel,
                      const std::string& ylabel) {
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0 && y[i] > 0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      pts.emplace_back(std::log10(x[i]), std::log10(y[i]));
    }
  }
  constexpr double W = 640, H = 420, M = 60;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title
      << "</text>\n";
  out << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M / 2 << "\" y2=\""
      << H - M << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << M << "\" y2=\"" << M / 2
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">log10 "
      << xlabel << "</text>\n";
  out << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2
      << ")\" text-anchor=\"middle\">log10 " << ylabel << "</text>\n";
  if (pts.size() >= 2) {
    double x0 = pts[0].first, x1 = x0, y0 = pts[0].second, y1 = y0;
    for (const auto& [a, b] : pts) {
      x0 = std::min(x0, a);
      x1 = std::max(x1, a);
      y0 = std::min(y0, b);
      y1 = std::max(y1, b);
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double a) { return M + (a - x0) / (x1 - x0) * (W - 1.5 * M); };
    auto py = [&](double b) { return H - M - (b - y0) / (y1 - y0) * (H - 1.5 * M); };
    out << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
    for (const auto& [a, b] : pts) out << FormatNumber(px(a)) << ',' << FormatNumber(py(b)) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << M << "\" y=\"" << H - M + 16 << "\">" << FormatNumber(x0)
        << "</text>\n";
    out << "<text x=\"" << W - 1.5 * M << "\" y=\"" << H - M + 16 << "\">" << FormatNumber(x1)
        << "</text>\n";
    out << "<text x=\"" << 4 << "\" y=\"" << H - M << "\">" << FormatNumber(y0) << "</text>\n";
    out << "<text x=\"" << 4 << "\" y=\"" << M / 2 + 10 << "\">" << FormatNumber(y1)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

}  // namespace stabkit
