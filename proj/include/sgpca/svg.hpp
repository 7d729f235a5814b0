#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "sgpca/error.hpp"
#include "sgpca/io.hpp"
#include "sgpca/tuning.hpp"

namespace sgpca {

// Alignment-versus-support diagnostic for one component: a fixed 800x600
// SVG with one marker per (eta, tau) cell and the selected cell highlighted.
// The plotted pairs are also written as a companion CSV next to the SVG so
// markers and rows correspond one-to-one. No plotting stack involved.
inline void emit_diagnostic_svg(const AlignmentReport& report, const std::string& path) {
  if (report.cells.empty())
    fail(ErrorCode::DataError, "emit_diagnostic_svg: empty report");

  const double width = 800.0, height = 600.0;
  const double left = 70.0, right = 30.0, top = 40.0, bottom = 60.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double max_support = 1.0;
  for (const auto& cell : report.cells) max_support = std::max(max_support, cell.mean_support);
  max_support *= 1.05;

  auto x_of = [&](double support) { return left + plot_w * (support / max_support); };
  auto y_of = [&](double align) { return top + plot_h * (1.0 - align); };

  std::ofstream svg(path);
  if (!svg) fail(ErrorCode::IoError, "emit_diagnostic_svg: cannot write '" + path + "'");
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  svg << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << "component " << report.component << ": alignment vs mean support size</text>\n";
  // axes
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double align = tick / 5.0;
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << y_of(align) << "\" x2=\"" << left
        << "\" y2=\"" << y_of(align) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 10 << "\" y=\"" << y_of(align) + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(align) << "</text>\n";
    const double support = max_support * tick / 5.0;
    svg << "<line x1=\"" << x_of(support) << "\" y1=\"" << top + plot_h << "\" x2=\""
        << x_of(support) << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "%.1f", support);
    svg << "<text x=\"" << x_of(support) << "\" y=\"" << top + plot_h + 20
        << "\" text-anchor=\"middle\" font-size=\"12\">" << label << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16
      << "\" text-anchor=\"middle\" font-size=\"14\">mean support size</text>\n";
  svg << "<text x=\"20\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << top + plot_h / 2 << ")\">alignment</text>\n";

  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const auto& cell = report.cells[i];
    const bool selected = static_cast<int>(i) == report.selected;
    svg << "<circle cx=\"" << x_of(cell.mean_support) << "\" cy=\"" << y_of(cell.align)
        << "\" r=\"" << (selected ? 8 : 4) << "\" fill=\""
        << (selected ? "#d62728" : "#1f77b4") << "\" fill-opacity=\""
        << (selected ? "0.9" : "0.6") << "\">"
        << "<title>eta=" << format_double(cell.eta) << " tau=" << format_double(cell.tau)
        << " align=" << format_double(cell.align) << "</title></circle>\n";
  }
  svg << "</svg>\n";

  // companion CSV with the raw plotted pairs, one row per marker
  std::string csv_path = path;
  const auto dot = csv_path.find_last_of('.');
  if (dot != std::string::npos) csv_path.resize(dot);
  csv_path += ".csv";
  std::ofstream csv(csv_path);
  if (!csv) fail(ErrorCode::IoError, "emit_diagnostic_svg: cannot write '" + csv_path + "'");
  csv << "component,eta,tau,mean_support,align,selected\n";
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const auto& cell = report.cells[i];
    csv << report.component << "," << format_double(cell.eta) << "," << format_double(cell.tau)
        << "," << format_double(cell.mean_support) << "," << format_double(cell.align) << ","
        << (static_cast<int>(i) == report.selected ? 1 : 0) << "\n";
  }
}

}  // namespace sgpca
