#include "weedbot/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "weedbot/csv.hpp"
#include "weedbot/error.hpp"

namespace weedbot::report {

namespace {

using csv::num;
using csv::write_row;

std::string xml_escape(const std::string& s)
{
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

struct Range {
    double lo{std::numeric_limits<double>::infinity()};
    double hi{-std::numeric_limits<double>::infinity()};

    void add(double v)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish()
    {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

struct Frame {
    PlotSpec spec;
    Range x;
    Range y;
    double left{70.0};
    double right{20.0};
    double top{40.0};
    double bottom{55.0};

    [[nodiscard]] double px(double v) const
    {
        return left + (v - x.lo) / (x.hi - x.lo) * (spec.width - left - right);
    }
    [[nodiscard]] double py(double v) const
    {
        return spec.height - bottom - (v - y.lo) / (y.hi - y.lo) * (spec.height - top - bottom);
    }
};

void open_svg(std::ostream& os, const Frame& f)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.spec.width << "\" height=\"" << f.spec.height
       << "\" viewBox=\"0 0 " << f.spec.width << ' ' << f.spec.height << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(f.spec.width / 2.0, 1) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << xml_escape(f.spec.title) << "</text>\n";
}

void draw_axes(std::ostream& os, const Frame& f, int ticks = 5)
{
    const double x0 = f.left;
    const double x1 = f.spec.width - f.right;
    const double y0 = f.spec.height - f.bottom;
    const double y1 = f.top;
    os << "<path d=\"M" << num(x0, 2) << ' ' << num(y1, 2) << " V" << num(y0, 2) << " H" << num(x1, 2)
       << "\" stroke=\"black\" fill=\"none\"/>\n";
    for (int i = 0; i <= ticks; ++i) {
        const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / ticks;
        const double yv = f.y.lo + (f.y.hi - f.y.lo) * i / ticks;
        os << "<text x=\"" << num(f.px(xv), 2) << "\" y=\"" << num(y0 + 16, 2)
           << "\" text-anchor=\"middle\" font-size=\"11\">" << num(xv, 2) << "</text>\n";
        os << "<text x=\"" << num(x0 - 6, 2) << "\" y=\"" << num(f.py(yv) + 4, 2)
           << "\" text-anchor=\"end\" font-size=\"11\">" << num(yv, 2) << "</text>\n";
    }
    os << "<text x=\"" << num((x0 + x1) / 2, 2) << "\" y=\"" << num(f.spec.height - 12.0, 2)
       << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(f.spec.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num((y0 + y1) / 2, 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
       << "transform=\"rotate(-90 16 " << num((y0 + y1) / 2, 2) << ")\">" << xml_escape(f.spec.y_label)
       << "</text>\n";
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

template <typename Fn>
void write_with(const std::filesystem::path& path, Fn&& fn)
{
    std::ostringstream os;
    fn(os);
    write_file(path, os.str());
}

std::filesystem::path prepare(const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir / "plots");
    return dir;
}

std::string u(std::size_t v) { return std::to_string(v); }

void metric(std::ostream& os, const std::string& name, const std::string& value)
{
    write_row(os, {name, value});
}

}  // namespace

void write_svg_plot(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series)
{
    Frame f;
    f.spec = spec;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            f.x.add(p.x);
            f.y.add(p.y);
        }
    }
    f.x.finish();
    f.y.finish();
    open_svg(os, f);
    draw_axes(os, f);
    int legend = 0;
    for (const auto& s : series) {
        if (s.line && s.points.size() >= 2) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                os << (i ? " " : "") << num(f.px(s.points[i].x), 2) << ',' << num(f.py(s.points[i].y), 2);
            }
            os << "\"/>\n";
        }
        if (s.markers) {
            for (const auto& p : s.points) {
                os << "<circle cx=\"" << num(f.px(p.x), 2) << "\" cy=\"" << num(f.py(p.y), 2)
                   << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            }
        }
        if (!s.label.empty()) {
            const double ly = f.top + 14.0 * legend++;
            os << "<rect x=\"" << num(spec.width - 190.0, 2) << "\" y=\"" << num(ly - 8, 2)
               << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
            os << "<text x=\"" << num(spec.width - 175.0, 2) << "\" y=\"" << num(ly + 1, 2) << "\" font-size=\"11\">"
               << xml_escape(s.label) << "</text>\n";
        }
    }
    os << "</svg>\n";
}

void write_svg_histogram(std::ostream& os, const PlotSpec& spec, const Histogram& hist)
{
    Frame f;
    f.spec = spec;
    const std::size_t bins = std::max<std::size_t>(hist.counts.size(), 1);
    f.x.lo = 0.0;
    f.x.hi = hist.bin_width * static_cast<double>(bins);
    f.y.lo = 0.0;
    std::size_t peak = 1;
    for (auto c : hist.counts) {
        peak = std::max(peak, c);
    }
    f.y.hi = static_cast<double>(peak) * 1.1;
    open_svg(os, f);
    draw_axes(os, f, static_cast<int>(std::min<std::size_t>(bins, 10)));
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        const double x0 = f.px(hist.bin_width * static_cast<double>(i));
        const double x1 = f.px(hist.bin_width * static_cast<double>(i + 1));
        const double y = f.py(static_cast<double>(hist.counts[i]));
        os << "<rect class=\"bar\" x=\"" << num(x0 + 1, 2) << "\" y=\"" << num(y, 2) << "\" width=\"" << num(x1 - x0 - 2, 2)
           << "\" height=\"" << num(f.py(0.0) - y, 2) << "\" fill=\"#4c72b0\"/>\n";
        os << "<text x=\"" << num((x0 + x1) / 2, 2) << "\" y=\"" << num(y - 4, 2)
           << "\" text-anchor=\"middle\" font-size=\"10\">" << hist.counts[i] << "</text>\n";
    }
    os << "</svg>\n";
}

void write_sweep_raw_csv(std::ostream& os, const SweepResult& result)
{
    write_row(os, {"speed_cm_s", "trial", "seed", "weeds_total", "weeds_detected", "false_positives", "detection_pct",
                   "weeding_time_s_per_m", "mission_time_s"});
    for (const auto& r : result.rows) {
        write_row(os, {num(r.speed_cm_s, 3), std::to_string(r.trial), std::to_string(r.seed), u(r.weeds_total),
                       u(r.weeds_detected), u(r.false_positives), num(r.detection_pct, 4),
                       num(r.weeding_time_s_per_m, 4), num(r.mission_time_s, 3)});
    }
}

void write_sweep_summary_csv(std::ostream& os, const SweepResult& result)
{
    const auto& m = result.model;
    write_row(os, {"metric", "value"});
    metric(os, "detection_slope", num(m.detection.slope, 6));
    metric(os, "detection_intercept", num(m.detection.intercept, 6));
    metric(os, "detection_r_squared", num(m.detection.r_squared, 6));
    metric(os, "weeding_time_slope", num(m.weeding_time.slope, 6));
    metric(os, "weeding_time_intercept", num(m.weeding_time.intercept, 6));
    metric(os, "weeding_time_r_squared", num(m.weeding_time.r_squared, 6));
    metric(os, "optimal_speed_cm_s", m.has_optimum ? num(m.optimal_speed_cm_s, 4) : "");
    metric(os, "reported_optimal_speed_cm_s", num(42.5, 4));
    metric(os, "reference_fit_intersection_cm_s", num((137.1 - 95.4) / (-0.24 + 1.266), 4));
}

void write_accuracy_raw_csv(std::ostream& os, const AccuracyReport& report)
{
    write_row(os, {"weed_index", "ex_mm", "ey_mm", "e_sq_mm2", "e_mm", "hit"});
    for (const auto& e : report.errors) {
        write_row(os, {std::to_string(e.weed_index), num(e.ex_mm, 6), num(e.ey_mm, 6), num(e.e_sq_mm2, 6),
                       num(e.e_mm, 6), e.hit ? "1" : "0"});
    }
}

void write_accuracy_summary_csv(std::ostream& os, const AccuracyReport& r)
{
    write_row(os, {"metric", "value"});
    metric(os, "speed_cm_s", num(r.speed_cm_s, 3));
    metric(os, "weeds_total", u(r.weeds_total));
    metric(os, "weeds_detected", u(r.weeds_detected));
    metric(os, "weeds_eliminated", u(r.weeds_eliminated));
    metric(os, "spots_measured", u(r.errors.size()));
    metric(os, "spots_missing", u(r.spots_missing));
    metric(os, "detection_rate", num(r.detection_rate, 6));
    metric(os, "hit_rate", num(r.hit_rate, 6));
    metric(os, "mean_abs_ex_mm", num(r.ex.mean, 6));
    metric(os, "std_abs_ex_mm", num(r.ex.stddev, 6));
    metric(os, "mean_abs_ey_mm", num(r.ey.mean, 6));
    metric(os, "std_abs_ey_mm", num(r.ey.stddev, 6));
    metric(os, "mean_e_mm", num(r.e.mean, 6));
    metric(os, "std_e_mm", num(r.e.stddev, 6));
    metric(os, "max_e_mm", num(r.e.max, 6));
    metric(os, "mission_time_s", num(r.mission_time_s, 3));
}

void write_histogram_csv(std::ostream& os, const AccuracyReport& r)
{
    write_row(os, {"quantity", "bin_lo_mm", "bin_hi_mm", "count"});
    const auto rows = [&os](const char* name, const Histogram& h) {
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            write_row(os, {name, num(h.bin_width * static_cast<double>(i), 3),
                           num(h.bin_width * static_cast<double>(i + 1), 3), u(h.counts[i])});
        }
    };
    rows("abs_ex", r.hist_ex);
    rows("abs_ey", r.hist_ey);
    rows("e", r.hist_e);
}

void write_stability_raw_csv(std::ostream& os, const StabilityReport& report)
{
    write_row(os, {"kind", "height_cm", "predicted_climb", "predicted_nav", "predicted_image", "observed_climb",
                   "observed_nav", "observed_image", "max_heading_error_deg", "max_extra_blur_px", "stuck",
                   "consistent"});
    for (const auto& r : report.rows) {
        write_row(os, {to_string(r.obstacle.kind), num(r.obstacle.height_cm, 2), kinematics::to_string(r.predicted.climb),
                       kinematics::to_string(r.predicted.nav_effect), kinematics::to_string(r.predicted.image_effect),
                       kinematics::to_string(r.observed.climb), kinematics::to_string(r.observed.nav_effect),
                       kinematics::to_string(r.observed.image_effect), num(r.max_heading_error_deg, 4),
                       num(r.max_extra_blur_px, 4), r.stuck ? "1" : "0", r.predicted == r.observed ? "1" : "0"});
    }
}

void write_stability_summary_csv(std::ostream& os, const StabilityReport& report)
{
    write_row(os, {"metric", "value"});
    metric(os, "obstacles", u(report.rows.size()));
    metric(os, "consistent", u(report.consistent_rows()));
    std::size_t yes = 0;
    std::size_t partial = 0;
    std::size_t no = 0;
    for (const auto& r : report.rows) {
        switch (r.predicted.climb) {
        case kinematics::Climb::yes: ++yes; break;
        case kinematics::Climb::partial: ++partial; break;
        case kinematics::Climb::no: ++no; break;
        }
    }
    metric(os, "climb_yes", u(yes));
    metric(os, "climb_partial", u(partial));
    metric(os, "climb_no", u(no));
}

void export_report(const SweepResult& result, const std::filesystem::path& dir)
{
    prepare(dir);
    write_with(dir / "raw.csv", [&](std::ostream& os) { write_sweep_raw_csv(os, result); });
    write_with(dir / "summary.csv", [&](std::ostream& os) { write_sweep_summary_csv(os, result); });

    std::vector<Vec2> det;
    std::vector<Vec2> time;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& r : result.rows) {
        det.push_back({r.speed_cm_s, r.detection_pct});
        time.push_back({r.speed_cm_s, r.weeding_time_s_per_m});
        lo = std::min(lo, r.speed_cm_s);
        hi = std::max(hi, r.speed_cm_s);
    }
    const auto fitted = [lo, hi](const LinearFit& fit) { return std::vector<Vec2>{{lo, fit.at(lo)}, {hi, fit.at(hi)}}; };
    const auto& m = result.model;
    std::vector<Series> combined{{"detection %", det, "#1f77b4", true, false},
                                 {"weeding time s/m", time, "#d62728", true, false}};
    if (m.has_optimum) {
        combined.push_back({"detection fit", fitted(m.detection), "#1f77b4", false, true});
        combined.push_back({"weeding time fit", fitted(m.weeding_time), "#d62728", false, true});
    }
    write_with(dir / "plots" / "sweep.svg", [&](std::ostream& os) {
        write_svg_plot(os, {"Detection and weeding time against speed", "speed (cm/s)", "value", 640, 400}, combined);
    });
    std::vector<Series> d{{"detection %", det, "#1f77b4", true, false}};
    std::vector<Series> t{{"weeding time s/m", time, "#d62728", true, false}};
    if (m.has_optimum) {
        d.push_back({"fit", fitted(m.detection), "#1f77b4", false, true});
        t.push_back({"fit", fitted(m.weeding_time), "#d62728", false, true});
    }
    write_with(dir / "plots" / "detection.svg", [&](std::ostream& os) {
        write_svg_plot(os, {"Detection rate", "speed (cm/s)", "detection (%)", 640, 400}, d);
    });
    write_with(dir / "plots" / "weeding_time.svg", [&](std::ostream& os) {
        write_svg_plot(os, {"Weeding time", "speed (cm/s)", "time (s/m)", 640, 400}, t);
    });
}

void export_report(const AccuracyReport& report, const std::filesystem::path& dir)
{
    prepare(dir);
    write_with(dir / "raw.csv", [&](std::ostream& os) { write_accuracy_raw_csv(os, report); });
    write_with(dir / "summary.csv", [&](std::ostream& os) { write_accuracy_summary_csv(os, report); });
    write_with(dir / "histogram.csv", [&](std::ostream& os) { write_histogram_csv(os, report); });
    write_with(dir / "plots" / "error_x.svg", [&](std::ostream& os) {
        write_svg_histogram(os, {"|ex| distribution", "|ex| (mm)", "weeds", 640, 400}, report.hist_ex);
    });
    write_with(dir / "plots" / "error_y.svg", [&](std::ostream& os) {
        write_svg_histogram(os, {"|ey| distribution", "|ey| (mm)", "weeds", 640, 400}, report.hist_ey);
    });
    write_with(dir / "plots" / "error_e.svg", [&](std::ostream& os) {
        write_svg_histogram(os, {"Resultant error distribution", "e (mm)", "weeds", 640, 400}, report.hist_e);
    });
}

void export_report(const StabilityReport& report, const std::filesystem::path& dir)
{
    prepare(dir);
    write_with(dir / "raw.csv", [&](std::ostream& os) { write_stability_raw_csv(os, report); });
    write_with(dir / "summary.csv", [&](std::ostream& os) { write_stability_summary_csv(os, report); });
    std::vector<Vec2> heading;
    std::vector<Vec2> blur;
    for (const auto& r : report.rows) {
        heading.push_back({r.obstacle.height_cm, r.max_heading_error_deg});
        blur.push_back({r.obstacle.height_cm, r.max_extra_blur_px});
    }
    write_with(dir / "plots" / "stability.svg", [&](std::ostream& os) {
        write_svg_plot(os, {"Obstacle effects", "obstacle height (cm)", "value", 640, 400},
                       {{"max heading error (deg)", heading, "#1f77b4", true, false},
                        {"extra blur (px)", blur, "#d62728", true, false}});
    });
}

}  // namespace weedbot::report
