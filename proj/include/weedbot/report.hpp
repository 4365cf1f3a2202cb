#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "weedbot/experiments.hpp"

namespace weedbot::report {

/// One polyline or point set in a plot.
struct Series {
    std::string label;
    std::vector<Vec2> points;
    std::string color{"#1f77b4"};
    bool markers{true};
    bool line{false};
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width{640};
    int height{400};
};

/// Scatter/line plot as standalone SVG. Output depends only on the inputs.
void write_svg_plot(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series);

/// Bar chart of histogram counts, bins labelled by their lower edge.
void write_svg_histogram(std::ostream& os, const PlotSpec& spec, const Histogram& hist);

void write_sweep_raw_csv(std::ostream& os, const SweepResult& result);
void write_sweep_summary_csv(std::ostream& os, const SweepResult& result);
void write_accuracy_raw_csv(std::ostream& os, const AccuracyReport& report);
void write_accuracy_summary_csv(std::ostream& os, const AccuracyReport& report);
void write_histogram_csv(std::ostream& os, const AccuracyReport& report);
void write_stability_raw_csv(std::ostream& os, const StabilityReport& report);
void write_stability_summary_csv(std::ostream& os, const StabilityReport& report);

/// raw.csv, summary.csv and plots/*.svg under `dir`, which is created if needed.
void export_report(const SweepResult& result, const std::filesystem::path& dir);
void export_report(const AccuracyReport& report, const std::filesystem::path& dir);
void export_report(const StabilityReport& report, const std::filesystem::path& dir);

}  // namespace weedbot::report
