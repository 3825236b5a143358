// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

// Property-based acceptance suite. Prints one PASS/FAIL line per criterion
// and exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "neuron_io/geometry.hpp"
#include "neuron_io/random.hpp"
#include "neuron_io/roles.hpp"
#include "neuron_io/simulator.hpp"
#include "neuron_io/synthetic.hpp"
#include "neuron_io/taxonomy.hpp"
#include "support.hpp"

using namespace neuron_io;
namespace nt = neuron_io::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

// Criterion 1: published triples of six hand-picked neurons.
Outcome golden_classification() {
    struct Golden {
        const char* neuron;
        CosineTriple cos;
        IOClass expected;
    };
    const Golden golden[] = {
        {"28.4737", {0.5290, 0.5048, 0.7060}, IOClass::enrichment},
        {"28.9766", {0.4764, 0.4119, 0.5982}, IOClass::conditional_enrichment},
        {"31.9634", {-0.7164, 0.7218, -0.8542}, IOClass::depletion},
        {"29.10900", {0.4988, -0.4992, -0.5775}, IOClass::conditional_depletion},
        {"30.10972", {-0.4543, 0.5814, -0.4182}, IOClass::proportional_change},
        {"29.4180", {-0.0272, -0.4057, 0.0669}, IOClass::orthogonal_output},
    };
    const auto t0 = Clock::now();
    std::vector<IOLabel> labels;
    for (const auto& g : golden) labels.push_back(classify(g.cos, 0.5));
    const double elapsed = seconds_since(t0);

    std::string mismatches;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const IOLabel want{golden[k].expected, false};
        if (!(labels[k] == want)) mismatches += fmt::format(" {}={}", golden[k].neuron, labels[k].str());
    }
    const bool ok = mismatches.empty() && elapsed < 1e-3;
    return {ok, fmt::format("6/6 expected, mismatches:{} time {:.1f} us", mismatches.empty() ? " none" : mismatches,
                            elapsed * 1e6)};
}

// Criterion 2: flipping w_in and w_out together.
Outcome sign_flip_symmetry() {
    Rng rng(20260101);
    std::size_t label_failures = 0;
    for (int k = 0; k < 10000; ++k) {
        const std::size_t d = 3 + rng.below(6);
        OwnedTriple t{nt::gaussian_vector(rng, d), nt::gaussian_vector(rng, d), nt::gaussian_vector(rng, d)};
        // Mix the gate into the other two so every class shows up.
        const float a = static_cast<float>(2.0 * rng.uniform() - 1.0);
        const float b = static_cast<float>(2.0 * rng.uniform() - 1.0);
        for (std::size_t c = 0; c < d; ++c) {
            t.in[c] += 2.0f * a * t.gate[c];
            t.out[c] += 2.0f * b * t.in[c];
        }
        OwnedTriple f = t;
        for (auto& v : f.in) v = -v;
        for (auto& v : f.out) v = -v;
        if (!(classify(cosine_triple(t.view()), 0.5) == classify(cosine_triple(f.view()), 0.5))) ++label_failures;
    }

    std::size_t sim_failures = 0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t d = 2 + rng.below(15);
        OwnedTriple t{nt::gaussian_vector(rng, d), nt::gaussian_vector(rng, d), nt::gaussian_vector(rng, d)};
        OwnedTriple f = t;
        for (auto& v : f.in) v = -v;
        for (auto& v : f.out) v = -v;
        const Activation kind = (k % 2 == 0) ? Activation::swish : Activation::gelu;
        const auto x = nt::gaussian_vector_f64(rng, d);
        const auto r = neuron_output(GatedNeuron(t, kind), x);
        const auto s = neuron_output(GatedNeuron(f, kind), x);
        if (r.delta != s.delta || std::abs(r.activation) != std::abs(s.activation)) ++sim_failures;
    }
    return {label_failures == 0 && sim_failures == 0,
            fmt::format("{} label and {} simulator failures", label_failures, sim_failures)};
}

// Criterion 3: i.i.d. Gaussian weights are almost all orthogonal output.
// For independent Gaussian vectors in d = 1024 the Monte Carlo estimate of
// P(|cos| > 0.5) is 0 in 200k draws with max |cos| = 0.146.
Outcome random_baseline() {
    const auto t0 = Clock::now();
    const auto model = make_gaussian_model(4, 4096, 1024, 0, 7);
    const auto t1 = Clock::now();
    const auto table = classify_model(model, 0.5);
    const double classify_s = seconds_since(t1);
    std::size_t orthogonal = 0;
    double max_abs = 0.0;
    for (const auto& r : table.records) {
        if (r.label.base == IOClass::orthogonal_output) ++orthogonal;
        max_abs = std::max({max_abs, std::abs(r.cos.gate_in), std::abs(r.cos.gate_out), std::abs(r.cos.in_out)});
    }
    const double total = static_cast<double>(4 * 4096);
    const double share = static_cast<double>(orthogonal) / total;
    const double elapsed = seconds_since(t0);
    const bool ok = table.records.size() == 4 * 4096 && share >= 0.999 && max_abs < 0.25 && elapsed < 10.0;
    return {ok, fmt::format("orthogonal share {:.5f}, max |cos| {:.4f}, classify {:.2f} s, total {:.2f} s", share,
                            max_abs, classify_s, elapsed)};
}

// Criterion 4: every prototype classifies back to its own typical class.
Outcome prototype_round_trip() {
    std::size_t pass = 0;
    std::size_t total = 0;
    for (auto base : kAllClasses) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            ++total;
            const auto t = prototype_triple(base, 16, seed);
            if (classify(cosine_triple(t.view()), 0.5) == IOLabel{base, false}) ++pass;
        }
    }
    return {pass == total, fmt::format("{}/{} round trips", pass, total)};
}

double rel_err(double got, long double want) {
    const long double diff = std::abs(static_cast<long double>(got) - want);
    const long double denom = std::abs(want);
    return static_cast<double>(denom > 0 ? diff / denom : diff);
}

// Criterion 5: moments against a textbook long double computation.
Outcome moment_oracle() {
    Rng rng(55);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<double> v(512);
        // Cosine-like values with a heavy right tail on every third profile.
        for (auto& x : v) x = 0.05 * rng.normal();
        if (k % 3 == 0) {
            for (int s = 0; s < 5; ++s) v[rng.below(v.size())] += 0.5 + rng.uniform();
        }
        const auto m = moments(v);
        const auto b = nt::brute_force_moments(v);
        if (!m.skew || !m.excess_kurtosis) return {false, fmt::format("profile {} has undefined moments", k)};
        worst = std::max({worst, rel_err(m.variance, b.variance), rel_err(*m.skew, b.skew),
                          rel_err(*m.excess_kurtosis, b.excess_kurtosis)});
    }
    return {worst <= 1e-10, fmt::format("worst relative error {:.3e} over 1000 profiles", worst)};
}

// Criterion 6: null-space share on an unembedding with a known decomposition.
Outcome null_space_projection() {
    const auto w = nt::exact_svd_unembed({100, 75, 50, 25});
    const UnembedSpectrum s(w);
    const auto small = nt::exact_svd_direction(3, 4);
    const auto large = nt::exact_svd_direction(0, 4);
    std::vector<float> mixed(4);
    for (std::size_t c = 0; c < 4; ++c) mixed[c] = small[c] + large[c];
    const double a = s.null_space_fraction(small, 1);
    const double b = s.null_space_fraction(large, 1);
    const double c = s.null_space_fraction(mixed, 1);
    const bool ok = std::abs(a - 1.0) < 1e-6 && std::abs(b) < 1e-6 && std::abs(c - std::sqrt(0.5)) < 1e-6;
    return {ok, fmt::format("fractions {:.9f} / {:.9f} / {:.9f}", a, b, c)};
}

// Criterion 7: double-checking geometry and the finite-grid activation region.
Outcome double_checking() {
    const std::vector<double> e1{1, 0}, e2{0, 1}, diag{1, 1};
    const double c1 = cosine(std::span<const double>(e1), std::span<const double>(diag));
    const double c2 = cosine(std::span<const double>(e2), std::span<const double>(diag));
    const double c0 = cosine(std::span<const double>(e1), std::span<const double>(e2));
    const double h = std::sqrt(0.5);
    const bool geometry = std::abs(c1 - h) < 1e-12 && std::abs(c2 - h) < 1e-12 && c0 == 0.0;

    const GatedNeuron n(OwnedTriple{{1, 0}, {0, 1}, {1, 0}}, Activation::swish);
    const double cap = swish(1.0) * 1.0;
    std::size_t violations = 0;
    double worst = -INFINITY;
    double wx1 = 0.0, wx2 = 0.0;
    for (int i = -40; i <= 40; ++i) {
        for (int j = -40; j <= 40; ++j) {
            const double x1 = i / 10.0;
            const double x2 = j / 10.0;
            if (!(x1 <= -1.0 || x2 <= 0.0)) continue;
            const double a = neuron_output(n, std::vector<double>{x1, x2}).activation;
            if (a >= cap) ++violations;
            if (a > worst) {
                worst = a;
                wx1 = x1;
                wx2 = x2;
            }
        }
    }
    return {geometry && violations == 0,
            fmt::format("geometry {}, grid violations {} of 81x81 (max activation {:.5f} at ({:.1f}, {:.1f}) vs "
                        "swish(1) = {:.5f})",
                        geometry ? "ok" : "wrong", violations, worst, wx1, wx2, cap)};
}

// Criterion 8: the weak negative Swish regime.
Outcome negative_swish() {
    constexpr double kSwishMinusOne = -0.26894142136999512075;  // mpmath, 30 digits
    const double s = swish(-1.0);
    bool ok = s > -0.27 && s < -0.26 && std::abs(s - kSwishMinusOne) < 1e-9;

    // Enrichment along e1 exactly, read at -e1.
    const GatedNeuron axis(OwnedTriple{{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}, Activation::swish);
    const auto r = neuron_output(axis, std::vector<double>{-1, 0, 0});
    ok = ok && r.delta[0] > 0.0 && std::abs(r.delta[0] - (-kSwishMinusOne)) < 1e-9;

    // Randomly oriented enrichment prototypes read at -u.
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = prototype_triple(IOClass::enrichment, 8, seed);
        std::vector<double> x(t.gate.begin(), t.gate.end());
        const double norm = std::sqrt(squared_norm(std::span<const double>(x)));
        for (auto& v : x) v = -v / norm;
        const auto p = neuron_output(GatedNeuron(t, Activation::swish), x);
        const double direct = swish(p.gate_preactivation) * p.in_preactivation;
        const double coeff = dot(std::span<const float>(t.out), std::span<const double>(p.delta));
        ok = ok && coeff > 0.0 && std::abs(p.activation - direct) < 1e-9;
    }
    return {ok, fmt::format("swish(-1) = {:.12f}, delta coefficient on -e1 = {:.12f}", s, r.delta[0])};
}

// Criterion 9: classify followed by plot twice on the same fixture.
Outcome determinism() {
    nt::TempDir tmp;
    auto run = [](std::vector<std::string> args) {
        std::ostringstream out, err;
        return cli::run(args, out, err);
    };
    const auto dir = (tmp / "fixture").string();
    if (run({"fixture", "--out", dir, "--layers", "4", "--per-class", "5", "--seed", "9"}) != 0) {
        return {false, "fixture generation failed"};
    }
    std::vector<std::string> csv, svg, bars;
    for (int k = 0; k < 2; ++k) {
        // Plot titles carry the input file stem, so each run uses the same names in its own directory.
        const auto run_dir = tmp / fmt::format("run{}", k);
        std::filesystem::create_directories(run_dir);
        const auto c = (run_dir / "classes.csv").string();
        const auto s = (run_dir / "scatter.svg").string();
        const auto b = (run_dir / "bars.svg").string();
        if (run({"classify", "--model-dir", dir, "--preset", "llama", "--out", c}) != 0 ||
            run({"plot", "--kind", "scatter", "--in", c, "--out", s}) != 0 ||
            run({"plot", "--kind", "bars", "--in", c, "--out", b}) != 0) {
            return {false, "pipeline run failed"};
        }
        csv.push_back(nt::read_file(c));
        svg.push_back(nt::read_file(s));
        bars.push_back(nt::read_file(b));
    }
    const bool ok = csv[0] == csv[1] && svg[0] == svg[1] && bars[0] == bars[1];
    return {ok, fmt::format("CSV {} bytes, SVGs {} and {} bytes, identical: {}", csv[0].size(), svg[0].size(),
                            bars[0].size(), ok ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"golden classification", golden_classification},
        {"sign-flip symmetry", sign_flip_symmetry},
        {"random Gaussian baseline", random_baseline},
        {"prototype round trip", prototype_round_trip},
        {"moment oracle", moment_oracle},
        {"null-space projection", null_space_projection},
        {"double-checking geometry", double_checking},
        {"negative Swish regime", negative_swish},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
