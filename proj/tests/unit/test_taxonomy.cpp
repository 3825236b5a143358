// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "neuron_io/error.hpp"
#include "neuron_io/random.hpp"
#include "neuron_io/synthetic.hpp"
#include "neuron_io/taxonomy.hpp"
#include "support.hpp"

using namespace neuron_io;

namespace {

IOLabel typical(IOClass c) { return {c, false}; }

CosineTriple random_triple(Rng& rng) {
    return {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
}

}  // namespace

TEST_CASE("published neuron triples") {
    CHECK(classify({0.5290, 0.5048, 0.7060}, 0.5) == typical(IOClass::enrichment));
    CHECK(classify({0.4764, 0.4119, 0.5982}, 0.5) == typical(IOClass::conditional_enrichment));
    CHECK(classify({-0.7164, 0.7218, -0.8542}, 0.5) == typical(IOClass::depletion));
    CHECK(classify({0.4988, -0.4992, -0.5775}, 0.5) == typical(IOClass::conditional_depletion));
    CHECK(classify({-0.4543, 0.5814, -0.4182}, 0.5) == typical(IOClass::proportional_change));
    CHECK(classify({-0.0272, -0.4057, 0.0669}, 0.5) == typical(IOClass::orthogonal_output));
}

TEST_CASE("classification rules") {
    for (double tau : {0.1, 0.5, 0.9}) CHECK(classify({0, 0, 0}, tau) == typical(IOClass::orthogonal_output));
    for (double tau : {0.0, 1.0, -0.5, std::nan("")}) CHECK_THROWS_AS((void)classify({0, 0, 0}, tau), UsageError);
    CHECK(classify({0.0, 0.8, 0.6}, 0.5) == IOLabel{IOClass::enrichment, true});
    CHECK(classify({0.9, 0.1, 0.8}, 0.5) == IOLabel{IOClass::conditional_enrichment, true});
    CHECK(classify({0.1, -0.9, -0.8}, 0.5) == IOLabel{IOClass::depletion, true});
    CHECK(classify({0.9, 0.1, -0.8}, 0.5) == IOLabel{IOClass::conditional_depletion, true});
    CHECK(classify({0.1, 0.9, 0.0}, 0.5) == typical(IOClass::proportional_change));
    CHECK(classify({0.7, 0.9, 0.0}, 0.5) == IOLabel{IOClass::proportional_change, true});
    CHECK(classify({0.7, 0.1, 0.0}, 0.5) == typical(IOClass::orthogonal_output));
}

TEST_CASE("values exactly at the threshold count as unaligned") {
    CHECK(classify({0.0, 0.0, 0.5}, 0.5).base == IOClass::orthogonal_output);
    CHECK(classify({0.0, 0.5, 0.6}, 0.5).base == IOClass::conditional_enrichment);
    CHECK(classify({0.0, 0.6, -0.5}, 0.5).base == IOClass::proportional_change);
    CHECK(classify({0.5, 0.6, 0.6}, 0.5) == IOLabel{IOClass::enrichment, true});
}

TEST_CASE("label names and indices") {
    const auto& labels = all_labels();
    for (std::size_t k = 0; k < labels.size(); ++k) {
        CHECK(labels[k].index() == k);
        CHECK(parse_io_label(labels[k].str()) == labels[k]);
    }
    CHECK(IOLabel{IOClass::depletion, true}.str() == "atypical_depletion");
    CHECK(to_string(IOClass::conditional_enrichment) == "conditional_enrichment");
    CHECK_THROWS_AS((void)parse_io_class("enriched"), DataError);
    CHECK_THROWS_AS((void)parse_io_label("atypical_orthogonal_output"), DataError);
}

TEST_CASE("input manipulators") {
    CHECK(is_input_manipulator(typical(IOClass::enrichment)));
    CHECK_FALSE(is_input_manipulator(typical(IOClass::orthogonal_output)));
    CHECK(is_input_manipulator({IOClass::conditional_depletion, true}));
}

TEST_CASE("sign flip of in and out leaves the label unchanged") {
    Rng rng(21);
    for (int k = 0; k < 10000; ++k) {
        const auto t = random_triple(rng);
        const CosineTriple flipped{-t.gate_in, -t.gate_out, t.in_out};
        REQUIRE(classify(flipped) == classify(t));
    }
}

TEST_CASE("raising tau never creates aligned pairs") {
    Rng rng(22);
    for (int k = 0; k < 5000; ++k) {
        const auto t = random_triple(rng);
        auto prev = classify(t, 0.01);
        for (double tau = 0.05; tau < 1.0; tau += 0.05) {
            const auto cur = classify(t, tau);
            // Once a channel is unaligned at some tau it stays unaligned above it.
            if (prev.base == IOClass::orthogonal_output) REQUIRE(cur.base == IOClass::orthogonal_output);
            if (prev.base == IOClass::proportional_change) {
                REQUIRE((cur.base == IOClass::proportional_change || cur.base == IOClass::orthogonal_output));
            }
            prev = cur;
        }
    }
}

TEST_CASE("classify_model on the prototype fixture matches construction") {
    PrototypeModelSpec spec;
    spec.n_layers = 3;
    spec.per_class = 4;
    const auto model = make_prototype_model(spec);
    const auto table = classify_model(model, 0.5);
    CHECK(table.n_layers == 3);
    CHECK(table.d_mlp == 24);
    REQUIRE(table.records.size() == 72);
    CHECK(table.degenerate.empty());
    for (const auto& r : table.records) {
        CHECK(r.label == typical(kAllClasses[r.id.index / 4]));
    }
    CHECK(table.find({2, 23}) != nullptr);
    CHECK(table.find({3, 0}) == nullptr);
}

TEST_CASE("empty model gives an empty table") {
    ModelWeights empty;
    const auto table = classify_model(empty);
    CHECK(table.records.empty());
    CHECK(table.n_layers == 0);
}

TEST_CASE("zero-norm neurons are reported separately") {
    ModelWeights m;
    m.layers.push_back({Matrix(2, 2, {1, 0, 0, 1}), Matrix(2, 2, {1, 0, 0, 1}), Matrix(2, 2, {1, 0, 0, 0})});
    m.refresh_meta();
    const auto table = classify_model(m);
    REQUIRE(table.records.size() == 1);
    REQUIRE(table.degenerate.size() == 1);
    CHECK(table.degenerate[0] == NeuronId{0, 1});
}

TEST_CASE("classification CSV round trip") {
    const auto model = make_gaussian_model(2, 50, 8, 0, 5);
    const auto table = classify_model(model);
    std::ostringstream os;
    write_classification_csv(os, table);
    std::istringstream is(os.str());
    const auto back = read_classification_csv(is);
    REQUIRE(back.records.size() == table.records.size());
    CHECK(back.n_layers == 2);
    CHECK(back.d_mlp == 50);
    for (std::size_t k = 0; k < table.records.size(); ++k) {
        CHECK(back.records[k].id == table.records[k].id);
        CHECK(back.records[k].label == table.records[k].label);
        CHECK(back.records[k].cos.in_out == doctest::Approx(table.records[k].cos.in_out).epsilon(1e-6));
    }
    std::ostringstream again;
    write_classification_csv(again, back);
    CHECK(again.str() == os.str());
}

TEST_CASE("malformed classification CSVs") {
    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return read_classification_csv(is);
    };
    const std::string header = "layer,index,cos_gate_in,cos_gate_out,cos_in_out,base_class,atypical\n";
    CHECK_THROWS_AS((void)parse(""), DataError);
    CHECK_THROWS_AS((void)parse("a,b\n"), DataError);
    CHECK_THROWS_AS((void)parse(header + "0,0,0.1,0.2\n"), DataError);
    CHECK_THROWS_AS((void)parse(header + "0,x,0.1,0.2,0.3,enrichment,0\n"), DataError);
    CHECK_THROWS_AS((void)parse(header + "0,0,0.1,0.2,0.3,enrichment,2\n"), DataError);
    CHECK_THROWS_AS((void)parse(header + "0,0,0.1,0.2,0.3,orthogonal_output,1\n"), DataError);
    CHECK_THROWS_AS((void)parse(header + "0,0,0,0,0,orthogonal_output,0\n0,0,0,0,0,orthogonal_output,0\n"),
                    DataError);
}
