#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "weedbot/report.hpp"

using namespace weedbot;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Every opened element is closed, in order, and the document ends with </svg>.
bool balanced_tags(const std::string& svg)
{
    std::vector<std::string> stack;
    std::size_t pos = 0;
    while ((pos = svg.find('<', pos)) != std::string::npos) {
        const auto end = svg.find('>', pos);
        if (end == std::string::npos) {
            return false;
        }
        const std::string tag = svg.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (tag.empty() || tag[0] == '?' || tag[0] == '!') {
            continue;
        }
        const auto name_end = tag.find_first_of(" />");
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) {
                return false;
            }
            stack.pop_back();
        } else if (tag.back() != '/') {
            stack.push_back(tag.substr(0, name_end));
        }
    }
    return stack.empty();
}

SweepResult sample_sweep()
{
    SweepResult r;
    for (double s : {30.0, 50.0, 70.0}) {
        SweepRow row;
        row.speed_cm_s = s;
        row.seed = 1;
        row.weeds_total = 100;
        row.weeds_detected = static_cast<std::size_t>(95.4 - 0.24 * s);
        row.detection_pct = 95.4 - 0.24 * s;
        row.weeding_time_s_per_m = 137.1 - 1.266 * s;
        r.rows.push_back(row);
    }
    std::vector<Vec2> d;
    std::vector<Vec2> t;
    for (const auto& row : r.rows) {
        d.push_back({row.speed_cm_s, row.detection_pct});
        t.push_back({row.speed_cm_s, row.weeding_time_s_per_m});
    }
    r.model.detection = linear_fit(d);
    r.model.weeding_time = linear_fit(t);
    r.model.optimal_speed_cm_s = optimal_speed(r.model.detection, r.model.weeding_time);
    r.model.has_optimum = true;
    return r;
}

AccuracyReport sample_accuracy()
{
    AccuracyReport r;
    r.speed_cm_s = 42.5;
    for (int i = 0; i < 5; ++i) {
        WeedError e;
        e.weed_index = i;
        e.ex_mm = 0.3 * i - 0.5;
        e.ey_mm = 1.1 - 0.2 * i;
        e.e_sq_mm2 = e.ex_mm * e.ex_mm + e.ey_mm * e.ey_mm;
        e.e_mm = std::sqrt(e.e_sq_mm2);
        e.hit = i != 3;
        r.errors.push_back(e);
    }
    std::vector<double> es;
    for (const auto& e : r.errors) {
        es.push_back(e.e_mm);
    }
    r.e = summarize(es);
    r.hist_e = histogram(es, 0.5);
    r.hist_ex = histogram({0.5, 0.2, 0.1, 0.4, 0.7}, 0.5);
    r.hist_ey = histogram({1.1, 0.9, 0.7, 0.5, 0.3}, 0.5);
    return r;
}

}  // namespace

TEST(Svg, PlotIsWellFormedAndStable)
{
    report::PlotSpec spec{"Detection & time", "speed", "value"};
    const std::vector<report::Series> series{{"data", {{30, 88}, {70, 78}}}, {"fit", {{30, 88}, {70, 78}}, "#d62728", false, true}};
    std::ostringstream a;
    std::ostringstream b;
    report::write_svg_plot(a, spec, series);
    report::write_svg_plot(b, spec, series);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_TRUE(balanced_tags(a.str()));
    EXPECT_NE(a.str().find("Detection &amp; time"), std::string::npos);
    EXPECT_NE(a.str().find("<polyline"), std::string::npos);
}

TEST(Svg, HistogramHasOneBarPerBin)
{
    const auto h = histogram({0.1, 0.2, 0.7, 1.6}, 0.5);
    std::ostringstream os;
    report::write_svg_histogram(os, {"e", "mm", "count"}, h);
    EXPECT_TRUE(balanced_tags(os.str()));
    std::size_t bars = 0;
    for (std::size_t p = 0; (p = os.str().find("<rect class=\"bar\"", p)) != std::string::npos; ++p) {
        ++bars;
    }
    EXPECT_EQ(bars, h.counts.size());
}

TEST(Svg, EmptyInputsStillRender)
{
    std::ostringstream os;
    report::write_svg_plot(os, {}, {});
    EXPECT_TRUE(balanced_tags(os.str()));
    std::ostringstream hs;
    report::write_svg_histogram(hs, {}, Histogram{});
    EXPECT_TRUE(balanced_tags(hs.str()));
}

TEST(Csv, SweepSummaryCarriesFitAndOptimum)
{
    std::ostringstream os;
    report::write_sweep_summary_csv(os, sample_sweep());
    const auto s = os.str();
    EXPECT_EQ(s.rfind("metric,value\r\n", 0), 0u);
    EXPECT_NE(s.find("detection_slope,-0.240000"), std::string::npos);
    EXPECT_NE(s.find("optimal_speed_cm_s,40.64"), std::string::npos);
    std::ostringstream raw;
    report::write_sweep_raw_csv(raw, sample_sweep());
    const std::string text = raw.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Csv, AccuracyRawRowsMatchErrors)
{
    const auto r = sample_accuracy();
    std::ostringstream os;
    report::write_accuracy_raw_csv(os, r);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "weed_index,ex_mm,ey_mm,e_sq_mm2,e_mm,hit\r");
    std::getline(in, line);
    EXPECT_EQ(line, "0,-0.500000,1.100000,1.460000,1.208305,1\r");
    std::ostringstream hist;
    report::write_histogram_csv(hist, r);
    EXPECT_NE(hist.str().find("bin_lo_mm"), std::string::npos);
}

TEST(Export, WritesFilesByteIdentically)
{
    const fs::path base = fs::temp_directory_path() / "weedbot_report_test";
    fs::remove_all(base);
    report::export_report(sample_accuracy(), base / "a");
    report::export_report(sample_accuracy(), base / "b");
    for (const char* name : {"raw.csv", "summary.csv", "histogram.csv"}) {
        ASSERT_TRUE(fs::exists(base / "a" / name)) << name;
        EXPECT_EQ(slurp(base / "a" / name), slurp(base / "b" / name)) << name;
    }
    EXPECT_FALSE(fs::is_empty(base / "a" / "plots"));
    report::export_report(sample_sweep(), base / "s");
    EXPECT_TRUE(fs::exists(base / "s" / "summary.csv"));
    report::export_report(StabilityReport{}, base / "t");
    EXPECT_TRUE(fs::exists(base / "t" / "raw.csv"));
    fs::remove_all(base);
}
