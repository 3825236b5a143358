// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace neuron_io::svg {

// Shortest decimal that parses back to the same double.
std::string exact(double v);
// Fixed two-decimal form for coordinates.
std::string coord(double v);
std::string escape(std::string_view text);

using Attrs = std::vector<std::pair<std::string, std::string>>;

/// Minimal append-only SVG 1.1 builder. Output depends only on the call sequence.
class Document {
public:
    Document(double width, double height, std::string_view comment);

    void rect(double x, double y, double w, double h, std::string_view fill, const Attrs& extra = {});
    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
              const Attrs& extra = {});
    void circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke = "none",
                const Attrs& extra = {});
    void polyline(const std::vector<std::pair<double, double>>& points, std::string_view stroke, double width,
                  const Attrs& extra = {});
    void text(double x, double y, std::string_view content, double size = 12.0, std::string_view anchor = "start",
              const Attrs& extra = {});
    void open_group(const Attrs& attrs);
    void close_group();

    [[nodiscard]] std::string str() const;

private:
    double width_;
    double height_;
    std::string comment_;
    std::string body_;
};

}  // namespace neuron_io::svg
