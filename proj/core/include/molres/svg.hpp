#pragma once

#include <string>

#include "molres/csv.hpp"

namespace molres {

/// Deterministic static SVG renderers for the experiment result tables.
/// Identical input tables produce identical bytes.

/// Matrix CSV (first column = row labels, remaining columns = cells) as a
/// colored heatmap with one rect per cell.
std::string render_heatmap_svg(const CsvTable& table, const std::string& title,
                               const std::string& x_label, const std::string& y_label);

/// First column = x, every remaining column = one line series. Columns with
/// no finite values are omitted from the plot and the legend.
std::string render_lines_svg(const CsvTable& table, const std::string& title,
                             const std::string& x_label, const std::string& y_label);

/// Memory curve (d, r2) with capacity/horizon annotation from the summary.
std::string render_memory_svg(const CsvTable& curve, const CsvTable& summary);

} // namespace molres
