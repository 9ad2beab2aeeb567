#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qclab/scene.hpp"
#include "qclab/version.hpp"

namespace qclab {

// All report bytes must be reproducible run to run: floats are printed with
// %.17g, object keys are sorted, and nothing derived from clocks or machine
// identity lands in a content file.

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write \"" + path + "\"");
    out << content;
    if (!out) throw ConfigError("failed while writing \"" + path + "\"");
}

// ---- CSV ------------------------------------------------------------------------

class CsvTable {
public:
    CsvTable(const std::string& scene_hash, const std::vector<std::string>& columns) {
        body_ << "# scene_hash=" << scene_hash << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) body_ << ',';
            body_ << columns[i];
        }
        body_ << '\n';
        width_ = columns.size();
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw InternalError("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ << ',';
            body_ << cells[i];
        }
        body_ << '\n';
    }

    std::string str() const { return body_.str(); }

private:
    std::ostringstream body_;
    std::size_t width_ = 0;
};

// ---- SVG ------------------------------------------------------------------------

inline constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

// Minimal deterministic SVG canvas.  Math coordinates go in (y up); the
// builder negates y so the picture is not mirrored, tracks bounds and pads
// the viewBox by 5%.
class SvgCanvas {
public:
    void add_circle(double cx, double cy, double r, int color, bool filled = false) {
        expand(cx - r, cy - r);
        expand(cx + r, cy + r);
        elems_ << "  <circle cx=\"" << format_double(cx) << "\" cy=\"" << format_double(-cy) << "\" r=\""
               << format_double(r) << "\" stroke=\"" << pick(color) << "\" fill=\""
               << (filled ? pick(color) : std::string("none")) << "\"" << (filled ? " fill-opacity=\"0.25\"" : "")
               << " stroke-width=\"" << format_double(stroke_) << "\"/>\n";
    }

    void add_segment(double x1, double y1, double x2, double y2, int color) {
        expand(x1, y1);
        expand(x2, y2);
        elems_ << "  <line x1=\"" << format_double(x1) << "\" y1=\"" << format_double(-y1) << "\" x2=\""
               << format_double(x2) << "\" y2=\"" << format_double(-y2) << "\" stroke=\"" << pick(color)
               << "\" stroke-width=\"" << format_double(stroke_) << "\"/>\n";
    }

    void add_polyline(const std::vector<std::pair<double, double>>& pts, int color) {
        if (pts.empty()) return;
        elems_ << "  <polyline points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            expand(pts[i].first, pts[i].second);
            if (i) elems_ << ' ';
            elems_ << format_double(pts[i].first) << ',' << format_double(-pts[i].second);
        }
        elems_ << "\" stroke=\"" << pick(color) << "\" fill=\"none\" stroke-width=\"" << format_double(stroke_)
               << "\"/>\n";
    }

    void set_stroke(double w) { stroke_ = w; }

    std::string str() const {
        double x0 = min_x_, y0 = min_y_, x1 = max_x_, y1 = max_y_;
        if (!(x0 <= x1)) {
            x0 = y0 = -1.0;
            x1 = y1 = 1.0;
        }
        const double pad = 0.05 * std::max({x1 - x0, y1 - y0, 1e-12});
        x0 -= pad;
        y0 -= pad;
        x1 += pad;
        y1 += pad;
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(x0) << ' '
            << format_double(-y1) << ' ' << format_double(x1 - x0) << ' ' << format_double(y1 - y0)
            << "\" width=\"800\" height=\"" << format_double(800.0 * (y1 - y0) / (x1 - x0)) << "\">\n"
            << elems_.str() << "</svg>\n";
        return out.str();
    }

private:
    static std::string pick(int color) {
        return kPalette[static_cast<std::size_t>(color) % kPalette.size()];
    }
    void expand(double x, double y) {
        min_x_ = std::min(min_x_, x);
        max_x_ = std::max(max_x_, x);
        min_y_ = std::min(min_y_, y);
        max_y_ = std::max(max_y_, y);
    }

    std::ostringstream elems_;
    double stroke_ = 0.004;
    double min_x_ = std::numeric_limits<double>::infinity();
    double min_y_ = std::numeric_limits<double>::infinity();
    double max_x_ = -std::numeric_limits<double>::infinity();
    double max_y_ = -std::numeric_limits<double>::infinity();
};

// ---- JSON summaries ---------------------------------------------------------------

inline Json summary_skeleton(const std::string& scene_hash) {
    Json j;
    j["meta"]["tool_version"] = version;
    j["meta"]["scene_hash"] = scene_hash;
    return j;
}

inline std::string render_json(const Json& j) {
    std::string out;
    canonical_write(j, out);
    out += '\n';
    return out;
}

inline void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory \"" + dir + "\": " + ec.message());
}

}
