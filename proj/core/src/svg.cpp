// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "svg.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace neuron_io::svg {

std::string exact(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

std::string coord(double v) {
    std::string s = fmt::format("{:.2f}", v);
    return s == "-0.00" ? "0.00" : s;
}

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
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

namespace {

std::string attrs_str(const Attrs& attrs) {
    std::string s;
    for (const auto& [k, v] : attrs) s += fmt::format(" {}=\"{}\"", k, escape(v));
    return s;
}

}  // namespace

Document::Document(double width, double height, std::string_view comment)
    : width_(width), height_(height), comment_(comment) {}

void Document::rect(double x, double y, double w, double h, std::string_view fill, const Attrs& extra) {
    body_ += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"{}/>\n", coord(x), coord(y),
                         coord(w), coord(h), fill, attrs_str(extra));
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width,
                    const Attrs& extra) {
    body_ += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"{}/>\n",
                         coord(x1), coord(y1), coord(x2), coord(y2), stroke, coord(width), attrs_str(extra));
}

void Document::circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke,
                      const Attrs& extra) {
    body_ += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"{}\"{}/>\n", coord(cx), coord(cy),
                         coord(r), fill, stroke, attrs_str(extra));
}

void Document::polyline(const std::vector<std::pair<double, double>>& points, std::string_view stroke, double width,
                        const Attrs& extra) {
    std::string pts;
    for (const auto& [x, y] : points) {
        if (!pts.empty()) pts += ' ';
        pts += coord(x) + "," + coord(y);
    }
    body_ += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{}/>\n", pts, stroke,
                         coord(width), attrs_str(extra));
}

void Document::text(double x, double y, std::string_view content, double size, std::string_view anchor,
                    const Attrs& extra) {
    body_ += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"{}\"{}>{}</text>\n", coord(x),
                         coord(y), coord(size), anchor, attrs_str(extra), escape(content));
}

void Document::open_group(const Attrs& attrs) { body_ += "<g" + attrs_str(attrs) + ">\n"; }

void Document::close_group() { body_ += "</g>\n"; }

std::string Document::str() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    out += fmt::format("<!-- {} -->\n", comment_);
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
        "font-family=\"sans-serif\">\n",
        coord(width_), coord(height_), coord(width_), coord(height_));
    out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", coord(width_),
                       coord(height_));
    out += body_;
    out += "</svg>\n";
    return out;
}

}  // namespace neuron_io::svg
