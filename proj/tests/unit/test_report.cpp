// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "neuron_io/error.hpp"
#include "neuron_io/report.hpp"
#include "neuron_io/synthetic.hpp"
#include "support.hpp"

using namespace neuron_io;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
    return n;
}

ClassificationTable prototype_table(std::size_t layers = 3, std::size_t per_class = 4) {
    PrototypeModelSpec spec;
    spec.n_layers = layers;
    spec.per_class = per_class;
    auto table = classify_model(make_prototype_model(spec));
    table.model = "prototypes";
    return table;
}

const std::filesystem::path kGolden = std::filesystem::path(NEURON_IO_TEST_DATA_DIR) / "bars_prototype.svg";

}  // namespace

TEST_CASE("plot kinds") {
    CHECK(parse_plot_kind("scatter") == PlotKind::scatter);
    CHECK(to_string(PlotKind::medians) == "medians");
    CHECK_THROWS_AS((void)parse_plot_kind("pie"), UsageError);
}

TEST_CASE("diverging colour scale") {
    CHECK(diverging_color(-1.0) == kColorNegative);
    CHECK(diverging_color(0.0) == kColorZero);
    CHECK(diverging_color(1.0) == kColorPositive);
    CHECK(diverging_color(5.0) == kColorPositive);
    CHECK(diverging_color(std::nan("")) == kColorZero);
    CHECK(diverging_color(0.5) != diverging_color(-0.5));
}

TEST_CASE("label colours are distinct") {
    std::set<std::string_view> colours;
    for (const auto& l : all_labels()) colours.insert(label_color(l));
    CHECK(colours.size() == kLabelCount);
}

TEST_CASE("selection sampling") {
    const auto all = sample_indices(10, 20, 1);
    CHECK(all.size() == 10);
    CHECK(all.back() == 9);
    const auto a = sample_indices(1000, 50, 7);
    const auto b = sample_indices(1000, 50, 7);
    const auto c = sample_indices(1000, 50, 8);
    CHECK(a.size() == 50);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    CHECK(a.back() < 1000);
    // Every index is kept with probability limit / n.
    std::vector<int> hits(20, 0);
    for (std::uint64_t seed = 0; seed < 4000; ++seed) {
        for (auto i : sample_indices(20, 5, seed)) ++hits[i];
    }
    for (int h : hits) CHECK(std::abs(h - 1000) < 150);
}

TEST_CASE("bars") {
    const auto table = prototype_table();
    const auto svg = render({PlotKind::bars}, {{build_report(table)}, nullptr});
    CHECK(svg.starts_with("<?xml"));
    CHECK(count(svg, "<g class=\"layer\"") == 3);
    CHECK(count(svg, "class=\"bar\"") == 3 * 6);
    for (const auto& l : all_labels()) CHECK(svg.find(label_color(l)) != std::string::npos);
    CHECK(svg.find("data-label=\"conditional_enrichment\" data-count=\"4\"") != std::string::npos);

    SUBCASE("matches the golden file") {
        // Set NEURON_IO_UPDATE_GOLDEN=1 to regenerate after an intended rendering change.
        if (std::getenv("NEURON_IO_UPDATE_GOLDEN")) neuron_io::testing::write_file(kGolden, svg);
        REQUIRE(std::filesystem::exists(kGolden));
        CHECK(svg == neuron_io::testing::read_file(kGolden));
    }
    SUBCASE("layer selection") {
        PlotSpec spec{PlotKind::bars};
        spec.layers = std::vector<std::size_t>{1};
        const auto one = render(spec, {{build_report(table)}, nullptr});
        CHECK(count(one, "<g class=\"layer\"") == 1);
        spec.layers = std::vector<std::size_t>{9};
        CHECK_THROWS_AS((void)render(spec, {{build_report(table)}, nullptr}), UsageError);
    }
}

TEST_CASE("box plot carries exact quantiles") {
    const auto table = prototype_table(2, 2);
    const auto rep = build_report(table);
    const auto svg = render({PlotKind::box}, {{rep}, nullptr});
    CHECK(count(svg, "class=\"box\"") == 2 * 3);
    CHECK(svg.find("data-channel=\"cos_in_out\"") != std::string::npos);
    const auto csv = plot_data_csv({PlotKind::box}, {{rep}, nullptr});
    CHECK(csv.starts_with("layer,channel,count,min,whisker_low,q1,median,q3,whisker_high,max,outliers\n"));
    CHECK(count(csv, "\n") == 1 + 2 * 3);
}

TEST_CASE("scatter of prototypes lands on six points") {
    const auto table = prototype_table(1, 1);
    PlotData data{{build_report(table)}, &table};
    const auto svg = render({PlotKind::scatter}, data);
    CHECK(count(svg, "data-neuron=") == 6);
    CHECK(count(svg, "class=\"unit-circle\"") == 1);
    const auto csv = plot_data_csv({PlotKind::scatter}, data);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "layer,index,cos_gate_in,cos_gate_out,cos_in_out");
    std::set<std::pair<int, int>> points;
    for (const auto& r : table.records) {
        points.insert({static_cast<int>(std::lround(r.cos.gate_out)), static_cast<int>(std::lround(r.cos.in_out))});
    }
    const std::set<std::pair<int, int>> expected = {{1, 1}, {-1, -1}, {0, 1}, {0, -1}, {1, 0}, {0, 0}};
    CHECK(points == expected);
    CHECK_THROWS_AS((void)render({PlotKind::scatter}, {{build_report(table)}, nullptr}), UsageError);
}

TEST_CASE("scatter sampling caps points per layer") {
    const auto table = prototype_table(2, 10);
    PlotSpec spec{PlotKind::scatter};
    spec.max_points_per_layer = 7;
    spec.seed = 3;
    PlotData data{{}, &table};
    const auto svg = render(spec, data);
    CHECK(count(svg, "data-neuron=") == 14);
    CHECK(render(spec, data) == svg);
    CHECK(count(plot_data_csv(spec, data), "\n") == 15);
}

TEST_CASE("medians with two models draw two polylines") {
    auto a = prototype_table(3, 1);
    auto b = prototype_table(5, 1);
    b.model = "other";
    PlotData data{{build_report(a), build_report(b)}, nullptr};
    const auto svg = render({PlotKind::medians}, data);
    CHECK(count(svg, "<polyline") == 2);
    CHECK(svg.find("data-model=\"other\"") != std::string::npos);
    const auto csv = plot_data_csv({PlotKind::medians}, data);
    CHECK(csv.starts_with("model,layer,depth,median_cos_in_out\n"));
    CHECK(count(csv, "\n") == 1 + 3 + 5);
}

TEST_CASE("plots need data") {
    CHECK_THROWS_AS((void)render({PlotKind::bars}, {}), UsageError);
    CHECK_THROWS_AS((void)render({PlotKind::medians}, {}), UsageError);
    CHECK_THROWS_AS((void)plot_data_csv({PlotKind::box}, {}), UsageError);
}

TEST_CASE("bars CSV shares sum to one per layer") {
    const auto table = prototype_table(2, 3);
    const auto csv = plot_data_csv({PlotKind::bars}, {{build_report(table)}, nullptr});
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "layer,label,count,share");
    std::vector<double> sums(2, 0.0);
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string layer, label, cnt, share;
        std::getline(ls, layer, ',');
        std::getline(ls, label, ',');
        std::getline(ls, cnt, ',');
        std::getline(ls, share, ',');
        sums[std::stoul(layer)] += std::stod(share);
    }
    for (double s : sums) CHECK(s == doctest::Approx(1.0));
}
