#include "csdsvm/cli/boxplot.hpp"

#include "csdsvm/cli/csv_io.hpp"
#include "csdsvm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace csdsvm::cli {

namespace {

constexpr double kWidthPerBox = 70.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 70.0;

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string px(double x) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << x;
    return s.str();
}

}  // namespace

BoxStats box_stats(std::string label, const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("box_stats: empty group '" + label + "'");
    BoxStats b;
    b.label = std::move(label);
    b.count = values.size();
    b.q1 = stats::quantile(values, 0.25);
    b.median = stats::quantile(values, 0.5);
    b.q3 = stats::quantile(values, 0.75);
    const double fence = 1.5 * (b.q3 - b.q1);
    const double lo = b.q1 - fence;
    const double hi = b.q3 + fence;
    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    for (double v : values) {
        if (v < lo || v > hi) {
            b.outliers.push_back(v);
            continue;
        }
        b.whisker_low = std::min(b.whisker_low, v);
        b.whisker_high = std::max(b.whisker_high, v);
    }
    std::sort(b.outliers.begin(), b.outliers.end());
    return b;
}

std::string render_boxplot_svg(const BoxplotChart& chart) {
    if (chart.boxes.empty()) throw std::invalid_argument("boxplot: nothing to draw");

    double ymin = INFINITY;
    double ymax = -INFINITY;
    for (const auto& b : chart.boxes) {
        ymin = std::min({ymin, b.whisker_low, b.q1});
        ymax = std::max({ymax, b.whisker_high, b.q3});
        for (double o : b.outliers) {
            ymin = std::min(ymin, o);
            ymax = std::max(ymax, o);
        }
    }
    for (double r : chart.reference_lines) {
        ymin = std::min(ymin, r);
        ymax = std::max(ymax, r);
    }
    double span = ymax - ymin;
    if (!(span > 0.0)) span = std::max(std::abs(ymax) * 0.2, 1e-3);
    ymin -= 0.05 * span;
    ymax += 0.05 * span;

    const double width = kMarginLeft + kMarginRight + kWidthPerBox * static_cast<double>(chart.boxes.size());
    const double plot_bottom = kHeight - kMarginBottom;
    const double plot_h = plot_bottom - kMarginTop;
    const auto y_of = [&](double v) { return plot_bottom - (v - ymin) / (ymax - ymin) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\""
        << px(kHeight) << "\" viewBox=\"0 0 " << px(width) << ' ' << px(kHeight) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << px(width) << "\" height=\"" << px(kHeight)
        << "\" fill=\"white\"/>\n";
    if (!chart.title.empty()) {
        svg << "<text x=\"" << px(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << xml_escape(chart.title)
            << "</text>\n";
    }

    // Axes and ticks.
    svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
        << "<line x1=\"" << px(kMarginLeft) << "\" y1=\"" << px(kMarginTop) << "\" x2=\""
        << px(kMarginLeft) << "\" y2=\"" << px(plot_bottom) << "\"/>\n"
        << "<line x1=\"" << px(kMarginLeft) << "\" y1=\"" << px(plot_bottom) << "\" x2=\""
        << px(width - kMarginRight) << "\" y2=\"" << px(plot_bottom) << "\"/>\n"
        << "</g>\n";
    svg << "<g class=\"yticks\" font-family=\"sans-serif\" font-size=\"10\">\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = ymin + (ymax - ymin) * t / 5.0;
        const double y = y_of(v);
        std::ostringstream label;
        label.precision(3);
        label << v;
        svg << "<line x1=\"" << px(kMarginLeft - 4) << "\" y1=\"" << px(y) << "\" x2=\""
            << px(kMarginLeft) << "\" y2=\"" << px(y) << "\" stroke=\"black\"/>"
            << "<text x=\"" << px(kMarginLeft - 6) << "\" y=\"" << px(y + 3)
            << "\" text-anchor=\"end\">" << label.str() << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<text x=\"16\" y=\"" << px(kMarginTop + plot_h / 2) << "\" transform=\"rotate(-90 16 "
        << px(kMarginTop + plot_h / 2) << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << xml_escape(chart.y_label) << "</text>\n";

    for (std::size_t i = 0; i < chart.boxes.size(); ++i) {
        const BoxStats& b = chart.boxes[i];
        const double cx = kMarginLeft + kWidthPerBox * (static_cast<double>(i) + 0.5);
        const double half = kWidthPerBox * 0.3;
        svg << "<g class=\"box\" data-label=\"" << xml_escape(b.label) << "\" data-count=\""
            << b.count << "\" data-q1=\"" << format_double(b.q1) << "\" data-median=\""
            << format_double(b.median) << "\" data-q3=\"" << format_double(b.q3)
            << "\" data-whisker-low=\"" << format_double(b.whisker_low)
            << "\" data-whisker-high=\"" << format_double(b.whisker_high) << "\">\n";
        svg << "<line x1=\"" << px(cx) << "\" y1=\"" << px(y_of(b.whisker_high)) << "\" x2=\""
            << px(cx) << "\" y2=\"" << px(y_of(b.q3)) << "\" stroke=\"black\"/>\n"
            << "<line x1=\"" << px(cx) << "\" y1=\"" << px(y_of(b.q1)) << "\" x2=\"" << px(cx)
            << "\" y2=\"" << px(y_of(b.whisker_low)) << "\" stroke=\"black\"/>\n";
        for (double w : {b.whisker_low, b.whisker_high}) {
            svg << "<line x1=\"" << px(cx - half / 2) << "\" y1=\"" << px(y_of(w)) << "\" x2=\""
                << px(cx + half / 2) << "\" y2=\"" << px(y_of(w)) << "\" stroke=\"black\"/>\n";
        }
        svg << "<rect class=\"box-body\" x=\"" << px(cx - half) << "\" y=\"" << px(y_of(b.q3))
            << "\" width=\"" << px(2 * half) << "\" height=\"" << px(y_of(b.q1) - y_of(b.q3))
            << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        svg << "<line class=\"median\" x1=\"" << px(cx - half) << "\" y1=\"" << px(y_of(b.median))
            << "\" x2=\"" << px(cx + half) << "\" y2=\"" << px(y_of(b.median))
            << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        for (double o : b.outliers) {
            svg << "<circle class=\"outlier\" cx=\"" << px(cx) << "\" cy=\"" << px(y_of(o))
                << "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
        }
        svg << "<text x=\"" << px(cx) << "\" y=\"" << px(plot_bottom + 14)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" "
            << "transform=\"rotate(-35 " << px(cx) << ' ' << px(plot_bottom + 14) << ")\">"
            << xml_escape(b.label) << "</text>\n";
        svg << "</g>\n";
    }

    for (double r : chart.reference_lines) {
        svg << "<line class=\"bayes-risk\" data-value=\"" << format_double(r) << "\" x1=\""
            << px(kMarginLeft) << "\" y1=\"" << px(y_of(r)) << "\" x2=\""
            << px(width - kMarginRight) << "\" y2=\"" << px(y_of(r))
            << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace csdsvm::cli
