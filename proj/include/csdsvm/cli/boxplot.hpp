#pragma once

#include <string>
#include <vector>

namespace csdsvm::cli {

/// Tukey box: type-7 quartiles, whiskers at the most extreme points within
/// 1.5 IQR of the box, everything beyond drawn as an outlier.
struct BoxStats {
    std::string label;
    std::size_t count = 0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outliers;
};

BoxStats box_stats(std::string label, const std::vector<double>& values);

struct BoxplotChart {
    std::string title;
    std::string y_label = "risk";
    std::vector<BoxStats> boxes;
    /// Drawn as dashed horizontal lines (the Bayes risk).
    std::vector<double> reference_lines;
};

/// Standalone SVG document. Each box is a <g class="box"> whose data-*
/// attributes carry the exact statistics.
std::string render_boxplot_svg(const BoxplotChart& chart);

}  // namespace csdsvm::cli
