// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "neuron_io/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "neuron_io/error.hpp"
#include "neuron_io/random.hpp"
#include "svg.hpp"

namespace neuron_io {

std::string_view to_string(PlotKind k) {
    switch (k) {
        case PlotKind::bars: return "bars";
        case PlotKind::box: return "box";
        case PlotKind::scatter: return "scatter";
        case PlotKind::medians: return "medians";
    }
    return "?";
}

PlotKind parse_plot_kind(std::string_view s) {
    for (auto k : {PlotKind::bars, PlotKind::box, PlotKind::scatter, PlotKind::medians}) {
        if (to_string(k) == s) return k;
    }
    throw UsageError("unknown plot kind '" + std::string(s) + "' (expected bars, box, scatter or medians)");
}

std::string diverging_color(double value) {
    struct Rgb { double r, g, b; };
    constexpr Rgb neg{0x21, 0x66, 0xac};
    constexpr Rgb zero{0xf7, 0xf7, 0xf7};
    constexpr Rgb pos{0xb2, 0x18, 0x2b};
    const double v = std::isfinite(value) ? std::clamp(value, -1.0, 1.0) : 0.0;
    const Rgb& far = v < 0.0 ? neg : pos;
    const double t = std::abs(v);
    auto mix = [&](double a, double b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
    return fmt::format("#{:02x}{:02x}{:02x}", mix(zero.r, far.r), mix(zero.g, far.g), mix(zero.b, far.b));
}

std::string_view label_color(const IOLabel& label) {
    static constexpr std::string_view typical[] = {"#1b9e77", "#66a61e", "#d95f02", "#e7298a", "#7570b3", "#999999"};
    static constexpr std::string_view atypical[] = {"#8fd3bb", "#b8dc8f", "#f2ae80", "#f39cc7", "#bab7d9", "#999999"};
    const auto b = static_cast<std::size_t>(label.base);
    return label.atypical ? atypical[b] : typical[b];
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t limit, std::uint64_t seed) {
    std::vector<std::size_t> out;
    if (n <= limit) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = i;
        return out;
    }
    // Selection sampling (Knuth, Algorithm S): each subset of size `limit` is equally likely.
    out.reserve(limit);
    Rng rng(seed);
    for (std::size_t t = 0; t < n && out.size() < limit; ++t) {
        const double keep = static_cast<double>(limit - out.size()) / static_cast<double>(n - t);
        if (rng.uniform() < keep) out.push_back(t);
    }
    return out;
}

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 200.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

std::string header_comment(PlotKind kind) {
    return fmt::format(
        "neuron-io plot kind={}; cos(w_gate,w_in) colour stops: -1 {}, 0 {}, +1 {}; data-* attributes hold exact "
        "source values",
        to_string(kind), kColorNegative, kColorZero, kColorPositive);
}

const Report& first_report(const PlotData& data) {
    if (data.reports.empty()) throw UsageError("plot needs a stats report");
    if (data.reports.front().layers.empty()) throw UsageError("plot: the report has no layers");
    return data.reports.front();
}

std::vector<const LayerSummary*> selected_layers(const PlotSpec& spec, const Report& rep) {
    std::vector<const LayerSummary*> out;
    for (const auto& L : rep.layers) {
        if (!spec.layers || std::find(spec.layers->begin(), spec.layers->end(), L.layer) != spec.layers->end()) {
            out.push_back(&L);
        }
    }
    if (out.empty()) throw UsageError("plot: no layers match the selection");
    return out;
}

struct Frame {
    double x0, y0, w, h;  // plot area in pixels
    double xmin, xmax, ymin, ymax;

    [[nodiscard]] double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    [[nodiscard]] double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void y_axis(svg::Document& doc, const Frame& f, double step, std::string_view label) {
    doc.line(f.x0, f.y0, f.x0, f.y0 + f.h, "#333333");
    const int first = static_cast<int>(std::ceil(f.ymin / step - 1e-9));
    const int last = static_cast<int>(std::floor(f.ymax / step + 1e-9));
    for (int k = first; k <= last; ++k) {
        const double v = k * step;
        const double y = f.py(v);
        doc.line(f.x0 - 4, y, f.x0, y, "#333333");
        doc.line(f.x0, y, f.x0 + f.w, y, "#e5e5e5", 0.5);
        doc.text(f.x0 - 8, y + 4, fmt::format("{:.2f}", v), 10, "end");
    }
    doc.text(16, f.y0 + f.h / 2, label, 12, "middle",
             {{"transform", fmt::format("rotate(-90 16 {})", svg::coord(f.y0 + f.h / 2))}});
}

void title(svg::Document& doc, double width, const std::string& text) {
    if (!text.empty()) doc.text(width / 2, 28, text, 16, "middle");
}

std::string render_bars(const PlotSpec& spec, const PlotData& data) {
    const auto& rep = first_report(data);
    const auto layers = selected_layers(spec, rep);
    const double plot_w = std::max(300.0, 18.0 * static_cast<double>(layers.size()));
    const double width = kLeft + plot_w + kRight;
    const double height = 460.0;
    const Frame f{kLeft, kTop, plot_w, height - kTop - kBottom, 0.0, static_cast<double>(layers.size()), 0.0, 1.0};

    svg::Document doc(width, height, header_comment(PlotKind::bars));
    title(doc, width, spec.title.empty() ? rep.model + ": IO classes by layer" : spec.title);
    y_axis(doc, f, 0.25, "share of neurons");
    const double slot = f.w / static_cast<double>(layers.size());
    for (std::size_t s = 0; s < layers.size(); ++s) {
        const auto& L = *layers[s];
        std::size_t total = 0;
        for (auto c : L.counts) total += c;
        doc.open_group({{"class", "layer"}, {"data-layer", std::to_string(L.layer)}, {"data-total", std::to_string(total)}});
        double acc = 0.0;
        for (const auto& label : all_labels()) {
            const std::size_t count = L.counts[label.index()];
            if (count == 0 || total == 0) continue;
            const double share = static_cast<double>(count) / static_cast<double>(total);
            const double top = f.py(acc + share);
            doc.rect(f.x0 + slot * static_cast<double>(s) + slot * 0.1, top, slot * 0.8, f.py(acc) - top,
                     label_color(label),
                     {{"class", "bar"}, {"data-label", label.str()}, {"data-count", std::to_string(count)}});
            acc += share;
        }
        doc.close_group();
        if (layers.size() <= 40 || L.layer % 5 == 0) {
            doc.text(f.x0 + slot * (static_cast<double>(s) + 0.5), f.y0 + f.h + 16, std::to_string(L.layer), 10, "middle");
        }
    }
    doc.text(f.x0 + f.w / 2, height - 16, "layer", 12, "middle");
    double ly = kTop;
    for (const auto& label : all_labels()) {
        doc.rect(f.x0 + f.w + 20, ly, 12, 12, label_color(label));
        doc.text(f.x0 + f.w + 38, ly + 10, label.str(), 10);
        ly += 18;
    }
    return doc.str();
}

std::string render_box(const PlotSpec& spec, const PlotData& data) {
    const auto& rep = first_report(data);
    const auto layers = selected_layers(spec, rep);
    static constexpr std::string_view channel_colors[] = {"#4daf4a", "#984ea3", "#ff7f00"};
    const double plot_w = std::max(300.0, 36.0 * static_cast<double>(layers.size()));
    const double width = kLeft + plot_w + kRight;
    const double height = 480.0;
    const Frame f{kLeft, kTop, plot_w, height - kTop - kBottom, 0.0, static_cast<double>(layers.size()), -1.0, 1.0};

    svg::Document doc(width, height, header_comment(PlotKind::box));
    title(doc, width, spec.title.empty() ? rep.model + ": weight cosines by layer" : spec.title);
    y_axis(doc, f, 0.5, "cosine");
    const double slot = f.w / static_cast<double>(layers.size());
    const double bw = slot / 4.0;
    for (std::size_t s = 0; s < layers.size(); ++s) {
        const auto& L = *layers[s];
        for (std::size_t c = 0; c < kAllChannels.size(); ++c) {
            const auto& b = L.box[c];
            const double xl = f.x0 + slot * static_cast<double>(s) + bw * (0.5 + static_cast<double>(c));
            const double xm = xl + bw / 2;
            const auto color = channel_colors[c];
            doc.open_group({{"class", "box"},
                            {"data-layer", std::to_string(L.layer)},
                            {"data-channel", std::string(to_string(kAllChannels[c]))},
                            {"data-count", std::to_string(b.count)},
                            {"data-median", svg::exact(b.median)},
                            {"data-q1", svg::exact(b.q1)},
                            {"data-q3", svg::exact(b.q3)},
                            {"data-whisker-low", svg::exact(b.whisker_low)},
                            {"data-whisker-high", svg::exact(b.whisker_high)}});
            doc.line(xm, f.py(b.whisker_high), xm, f.py(b.q3), color);
            doc.line(xm, f.py(b.q1), xm, f.py(b.whisker_low), color);
            doc.rect(xl, f.py(b.q3), bw * 0.9, std::max(0.5, f.py(b.q1) - f.py(b.q3)), color,
                     {{"fill-opacity", "0.35"}, {"stroke", std::string(color)}});
            doc.line(xl, f.py(b.median), xl + bw * 0.9, f.py(b.median), "#000000", 1.5);
            for (const auto& [id, v] : b.outliers) {
                doc.circle(xm, f.py(v), 1.5, "none", color,
                           {{"class", "outlier"}, {"data-neuron", id.str()}, {"data-value", svg::exact(v)}});
            }
            doc.close_group();
        }
        if (layers.size() <= 40 || L.layer % 5 == 0) {
            doc.text(f.x0 + slot * (static_cast<double>(s) + 0.5), f.y0 + f.h + 16, std::to_string(L.layer), 10, "middle");
        }
    }
    doc.text(f.x0 + f.w / 2, height - 16, "layer", 12, "middle");
    double ly = kTop;
    for (std::size_t c = 0; c < kAllChannels.size(); ++c) {
        doc.rect(f.x0 + f.w + 20, ly, 12, 12, channel_colors[c]);
        doc.text(f.x0 + f.w + 38, ly + 10, to_string(kAllChannels[c]), 10);
        ly += 18;
    }
    return doc.str();
}

struct ScatterLayer {
    std::size_t layer;
    std::vector<const ClassifiedNeuron*> points;
};

std::vector<ScatterLayer> scatter_layers(const PlotSpec& spec, const ClassificationTable& table) {
    std::vector<ScatterLayer> out;
    std::size_t start = 0;
    const auto& rs = table.records;
    while (start < rs.size()) {
        std::size_t end = start;
        while (end < rs.size() && rs[end].id.layer == rs[start].id.layer) ++end;
        const std::size_t layer = rs[start].id.layer;
        if (!spec.layers || std::find(spec.layers->begin(), spec.layers->end(), layer) != spec.layers->end()) {
            ScatterLayer sl{layer, {}};
            // One independent stream per layer so selecting layers does not change the sample.
            for (auto k : sample_indices(end - start, spec.max_points_per_layer, spec.seed + layer)) {
                sl.points.push_back(&rs[start + k]);
            }
            out.push_back(std::move(sl));
        }
        start = end;
    }
    if (out.empty()) throw UsageError("scatter: no layers match the selection");
    return out;
}

std::string render_scatter(const PlotSpec& spec, const PlotData& data) {
    if (!data.classes || data.classes->records.empty()) throw UsageError("scatter needs classified neurons");
    const auto layers = scatter_layers(spec, *data.classes);
    const std::size_t cols = std::min<std::size_t>(4, layers.size());
    const std::size_t rows = (layers.size() + cols - 1) / cols;
    constexpr double panel = 220.0;
    constexpr double gap = 50.0;
    const double width = kLeft + static_cast<double>(cols) * (panel + gap) + 120.0;
    const double height = kTop + static_cast<double>(rows) * (panel + gap) + 20.0;

    svg::Document doc(width, height, header_comment(PlotKind::scatter));
    title(doc, width, spec.title.empty() ? data.classes->model + ": weight cosines per neuron" : spec.title);
    for (std::size_t p = 0; p < layers.size(); ++p) {
        const double x0 = kLeft + static_cast<double>(p % cols) * (panel + gap);
        const double y0 = kTop + static_cast<double>(p / cols) * (panel + gap);
        const Frame f{x0, y0, panel, panel, -1.0, 1.0, -1.0, 1.0};
        doc.rect(x0, y0, panel, panel, "none", {{"stroke", "#333333"}});
        doc.line(f.px(0), y0, f.px(0), y0 + panel, "#cccccc", 0.5);
        doc.line(x0, f.py(0), x0 + panel, f.py(0), "#cccccc", 0.5);
        doc.circle(f.px(0), f.py(0), panel / 2, "none", "#888888", {{"class", "unit-circle"}});
        doc.text(x0 + panel / 2, y0 - 6, "layer " + std::to_string(layers[p].layer), 11, "middle");
        doc.text(x0 + panel / 2, y0 + panel + 16, "cos(w_gate, w_out)", 10, "middle");
        doc.text(x0 - 8, y0 + panel / 2, "cos(w_in, w_out)", 10, "middle",
                 {{"transform", fmt::format("rotate(-90 {} {})", svg::coord(x0 - 8), svg::coord(y0 + panel / 2))}});
        doc.open_group({{"class", "layer"}, {"data-layer", std::to_string(layers[p].layer)},
                        {"data-points", std::to_string(layers[p].points.size())}});
        for (const auto* r : layers[p].points) {
            doc.circle(f.px(r->cos.gate_out), f.py(r->cos.in_out), 2.0, diverging_color(r->cos.gate_in), "none",
                       {{"data-neuron", r->id.str()},
                        {"data-cgi", svg::exact(r->cos.gate_in)},
                        {"data-cgo", svg::exact(r->cos.gate_out)},
                        {"data-cio", svg::exact(r->cos.in_out)}});
        }
        doc.close_group();
    }
    // colour bar
    const double bx = width - 90.0;
    for (int k = 0; k <= 20; ++k) {
        const double v = 1.0 - 0.1 * k;
        doc.rect(bx, kTop + 8.0 * k, 14, 8, diverging_color(v));
    }
    doc.text(bx + 18, kTop + 8, "+1", 10);
    doc.text(bx + 18, kTop + 84, "0", 10);
    doc.text(bx + 18, kTop + 168, "-1", 10);
    doc.text(bx, kTop - 8, "cos(w_gate, w_in)", 10);
    return doc.str();
}

std::string render_medians(const PlotSpec& spec, const PlotData& data) {
    if (data.reports.empty()) throw UsageError("medians needs at least one stats report");
    static constexpr std::string_view palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                                   "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};
    double extent = 0.05;
    for (const auto& rep : data.reports) {
        if (rep.medians.points.empty()) throw UsageError("medians: report for '" + rep.model + "' has no points");
        for (const auto& [d, m] : rep.medians.points) extent = std::max(extent, std::abs(m));
    }
    extent = std::ceil(extent * 1.1 / 0.05) * 0.05;
    const double width = kLeft + 520.0 + kRight;
    const double height = 420.0;
    const Frame f{kLeft, kTop, 520.0, height - kTop - kBottom, 0.0, 1.0, -extent, extent};

    svg::Document doc(width, height, header_comment(PlotKind::medians));
    title(doc, width, spec.title.empty() ? "median cos(w_in, w_out) by relative depth" : spec.title);
    y_axis(doc, f, extent > 0.5 ? 0.25 : 0.05, "median cos(w_in, w_out)");
    doc.line(f.x0, f.py(0), f.x0 + f.w, f.py(0), "#999999");
    for (int k = 0; k <= 4; ++k) {
        const double x = f.px(0.25 * k);
        doc.line(x, f.y0 + f.h, x, f.y0 + f.h + 4, "#333333");
        doc.text(x, f.y0 + f.h + 16, fmt::format("{:.2f}", 0.25 * k), 10, "middle");
    }
    doc.text(f.x0 + f.w / 2, height - 16, "relative depth (layer / (n_layers - 1))", 12, "middle");
    for (std::size_t m = 0; m < data.reports.size(); ++m) {
        const auto& rep = data.reports[m];
        const auto color = palette[m % std::size(palette)];
        std::vector<std::pair<double, double>> pts;
        for (const auto& [d, v] : rep.medians.points) pts.emplace_back(f.px(d), f.py(v));
        doc.open_group({{"class", "model"}, {"data-model", rep.model}});
        doc.polyline(pts, color, 1.5);
        for (std::size_t l = 0; l < rep.medians.points.size(); ++l) {
            const auto& [d, v] = rep.medians.points[l];
            doc.circle(f.px(d), f.py(v), 2.5, color, "none",
                       {{"data-layer", std::to_string(l)}, {"data-depth", svg::exact(d)}, {"data-median", svg::exact(v)}});
        }
        doc.close_group();
        doc.rect(f.x0 + f.w + 20, kTop + 18.0 * static_cast<double>(m), 12, 12, color);
        doc.text(f.x0 + f.w + 38, kTop + 18.0 * static_cast<double>(m) + 10, rep.model, 10);
    }
    return doc.str();
}

}  // namespace

std::string render(const PlotSpec& spec, const PlotData& data) {
    switch (spec.kind) {
        case PlotKind::bars: return render_bars(spec, data);
        case PlotKind::box: return render_box(spec, data);
        case PlotKind::scatter: return render_scatter(spec, data);
        case PlotKind::medians: return render_medians(spec, data);
    }
    throw UsageError("unknown plot kind");
}

std::string plot_data_csv(const PlotSpec& spec, const PlotData& data) {
    std::string out;
    switch (spec.kind) {
        case PlotKind::bars: {
            out = "layer,label,count,share\n";
            for (const auto* L : selected_layers(spec, first_report(data))) {
                std::size_t total = 0;
                for (auto c : L->counts) total += c;
                for (const auto& label : all_labels()) {
                    const auto c = L->counts[label.index()];
                    const double share = total ? static_cast<double>(c) / static_cast<double>(total) : 0.0;
                    out += fmt::format("{},{},{},{}\n", L->layer, label.str(), c, svg::exact(share));
                }
            }
            break;
        }
        case PlotKind::box: {
            out = "layer,channel,count,min,whisker_low,q1,median,q3,whisker_high,max,outliers\n";
            for (const auto* L : selected_layers(spec, first_report(data))) {
                for (std::size_t c = 0; c < kAllChannels.size(); ++c) {
                    const auto& b = L->box[c];
                    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", L->layer, to_string(kAllChannels[c]), b.count,
                                       svg::exact(b.min), svg::exact(b.whisker_low), svg::exact(b.q1),
                                       svg::exact(b.median), svg::exact(b.q3), svg::exact(b.whisker_high),
                                       svg::exact(b.max), b.outliers.size());
                }
            }
            break;
        }
        case PlotKind::scatter: {
            if (!data.classes || data.classes->records.empty()) throw UsageError("scatter needs classified neurons");
            out = "layer,index,cos_gate_in,cos_gate_out,cos_in_out\n";
            for (const auto& sl : scatter_layers(spec, *data.classes)) {
                for (const auto* r : sl.points) {
                    out += fmt::format("{},{},{},{},{}\n", r->id.layer, r->id.index, svg::exact(r->cos.gate_in),
                                       svg::exact(r->cos.gate_out), svg::exact(r->cos.in_out));
                }
            }
            break;
        }
        case PlotKind::medians: {
            if (data.reports.empty()) throw UsageError("medians needs at least one stats report");
            out = "model,layer,depth,median_cos_in_out\n";
            for (const auto& rep : data.reports) {
                for (std::size_t l = 0; l < rep.medians.points.size(); ++l) {
                    out += fmt::format("{},{},{},{}\n", rep.model, l, svg::exact(rep.medians.points[l].first),
                                       svg::exact(rep.medians.points[l].second));
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace neuron_io
