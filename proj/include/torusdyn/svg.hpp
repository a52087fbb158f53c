#pragma once

// Deterministic SVG 1.1 emission: fixed 6-decimal coordinates, element order
// equal to layer insertion order, no timestamps.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "torusdyn/torus_core.hpp"

namespace torusdyn {

struct FigureWindow {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    int width = 900, height = 900;
};

class SvgFigure {
  public:
    explicit SvgFigure(FigureWindow w) : win_(w) {}

    void add_polyline(const std::vector<LiftedPoint>& pts, const std::string& stroke,
                      double stroke_width, const std::string& dash = "") {
        if (pts.empty()) return;
        std::ostringstream os;
        os << "  <polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
           << fmt(stroke_width) << "\"";
        if (!dash.empty()) os << " stroke-dasharray=\"" << dash << "\"";
        os << " points=\"";
        for (size_t i = 0; i < pts.size(); ++i) {
            if (i) os << ' ';
            os << fmt(px(pts[i].x1)) << ',' << fmt(py(pts[i].x2));
        }
        os << "\"/>\n";
        body_ += os.str();
    }

    void add_marker(LiftedPoint p, double radius_px, const std::string& fill,
                    const std::string& label = "") {
        std::ostringstream os;
        os << "  <circle cx=\"" << fmt(px(p.x1)) << "\" cy=\"" << fmt(py(p.x2))
           << "\" r=\"" << fmt(radius_px) << "\" fill=\"" << fill << "\"/>\n";
        if (!label.empty())
            os << "  <text x=\"" << fmt(px(p.x1) + 6.0) << "\" y=\""
               << fmt(py(p.x2) - 6.0) << "\" font-size=\"12\" fill=\"" << fill << "\">"
               << label << "</text>\n";
        body_ += os.str();
    }

    void add_circle_outline(LiftedPoint c, double radius, const std::string& stroke) {
        std::ostringstream os;
        os << "  <ellipse cx=\"" << fmt(px(c.x1)) << "\" cy=\"" << fmt(py(c.x2))
           << "\" rx=\"" << fmt(radius * sx()) << "\" ry=\"" << fmt(radius * sy())
           << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1\"/>\n";
        body_ += os.str();
    }

    void add_polygon(const std::vector<LiftedPoint>& pts, const std::string& stroke) {
        if (pts.empty()) return;
        std::ostringstream os;
        os << "  <polygon fill=\"none\" stroke=\"" << stroke
           << "\" stroke-width=\"1\" points=\"";
        for (size_t i = 0; i < pts.size(); ++i) {
            if (i) os << ' ';
            os << fmt(px(pts[i].x1)) << ',' << fmt(py(pts[i].x2));
        }
        os << "\"/>\n";
        body_ += os.str();
    }

    // short segment centered at p along dir, for direction-field glyphs
    void add_glyph(LiftedPoint p, Vec2 dir, double half_len, const std::string& stroke) {
        std::ostringstream os;
        os << "  <line x1=\"" << fmt(px(p.x1 - half_len * dir.x)) << "\" y1=\""
           << fmt(py(p.x2 - half_len * dir.y)) << "\" x2=\""
           << fmt(px(p.x1 + half_len * dir.x)) << "\" y2=\""
           << fmt(py(p.x2 + half_len * dir.y)) << "\" stroke=\"" << stroke
           << "\" stroke-width=\"0.8\"/>\n";
        body_ += os.str();
    }

    int layer_count() const { return layers_; }
    void bump_layer() { ++layers_; }

    std::string finalize() const {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
           << win_.width << "\" height=\"" << win_.height << "\" viewBox=\"0 0 "
           << win_.width << ' ' << win_.height << "\">\n"
           << "  <rect x=\"0\" y=\"0\" width=\"" << win_.width << "\" height=\""
           << win_.height << "\" fill=\"white\" stroke=\"black\"/>\n"
           << body_ << "</svg>\n";
        return os.str();
    }

  private:
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return buf;
    }
    double sx() const { return win_.width / (win_.x1 - win_.x0); }
    double sy() const { return win_.height / (win_.y1 - win_.y0); }
    double px(double x) const { return (x - win_.x0) * sx(); }
    double py(double y) const { return win_.height - (y - win_.y0) * sy(); }

    FigureWindow win_;
    std::string body_;
    int layers_ = 0;
};

}  // namespace torusdyn
