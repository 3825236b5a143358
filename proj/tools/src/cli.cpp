// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "neuron_io/error.hpp"
#include "neuron_io/report.hpp"
#include "neuron_io/roles.hpp"
#include "neuron_io/simulator.hpp"
#include "neuron_io/stats.hpp"
#include "neuron_io/synthetic.hpp"
#include "neuron_io/taxonomy.hpp"
#include "neuron_io/version.hpp"
#include "neuron_io/vocab_lens.hpp"
#include "neuron_io/weights.hpp"

namespace neuron_io::cli {

namespace fs = std::filesystem;

namespace {

// Options shared by every subcommand that loads a checkpoint.
struct ModelArgs {
    std::string dir;
    std::string preset;
    std::string mapping;
    std::string name;
    bool fold_norm = false;

    void add_to(CLI::App& sub) {
        sub.add_option("--model-dir", dir, "directory holding *.safetensors shards")
            ->required()
            ->check(CLI::ExistingDirectory);
        sub.add_option("--preset", preset, "tensor-name preset: llama, olmo, gemma, qwen or generic")->required();
        sub.add_option("--mapping", mapping, "JSON tensor mapping, required with --preset generic")
            ->check(CLI::ExistingFile);
        sub.add_option("--model-name", name, "name recorded in outputs (default: directory name)");
        sub.add_flag("--fold-norm", fold_norm, "fold the MLP input norm gain into the reading weights");
    }

    [[nodiscard]] Preset resolve() const {
        return resolve_preset(preset, mapping.empty() ? std::nullopt : std::optional<fs::path>(mapping));
    }

    [[nodiscard]] ModelWeights load(RunManifest& manifest, bool attention, const std::string& bos_keys = {}) const {
        const Preset p = resolve();
        LoadOptions opts;
        opts.model_name = name;
        opts.fold_norm_gains = fold_norm;
        opts.load_attention = attention;
        if (!bos_keys.empty()) opts.bos_keys = fs::path(bos_keys);
        manifest.input(dir);
        if (!mapping.empty()) manifest.input(mapping);
        if (!bos_keys.empty()) manifest.input(bos_keys);
        auto phase = manifest.phase("load");
        return load_model(dir, p, opts);
    }
};

struct Context {
    std::ostream& out;
    std::ostream& err;
};

fs::path manifest_path(const std::string& explicit_path, const std::string& out, std::string_view command) {
    if (!explicit_path.empty()) return explicit_path;
    if (!out.empty()) return fs::path(out + ".manifest.json");
    return fs::path(fmt::format("neuron-io-{}.manifest.json", command));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw DataError("short write to '" + path.string() + "'");
}

// Copies every option value of `sub` into the manifest, in declaration order.
void record_parameters(const CLI::App& sub, RunManifest& manifest) {
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_name(false, true);
        if (name.empty() || name == "--help" || name == "-h") continue;
        std::string key = opt->get_single_name();
        if (opt->count() == 0) {
            const std::string def = opt->get_default_str();
            if (def.empty()) continue;
            manifest.parameter(key, def);
        } else if (opt->get_expected_max() > 1) {
            manifest.parameter(key, opt->results());
        } else if (opt->get_type_size() == 0) {
            manifest.parameter(key, true);
        } else {
            manifest.parameter(key, opt->results().back());
        }
    }
}

std::vector<std::string> degenerate_warning(const ClassificationTable& table) {
    std::vector<std::string> lines;
    if (table.degenerate.empty()) return lines;
    std::string ids;
    for (std::size_t i = 0; i < table.degenerate.size() && i < 10; ++i) {
        ids += (i ? ", " : "") + table.degenerate[i].str();
    }
    if (table.degenerate.size() > 10) ids += ", ...";
    lines.push_back(fmt::format("warning: {} zero-norm neuron(s) skipped: {}", table.degenerate.size(), ids));
    return lines;
}

// ---------------------------------------------------------------- classify

struct ClassifyCmd {
    ModelArgs model;
    double tau = kDefaultTau;
    std::string out;
    std::string manifest;

    void add_to(CLI::App& sub) {
        model.add_to(sub);
        sub.add_option("--tau", tau, "alignment threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
        sub.add_option("--out", out, "classification CSV to write")->required();
        sub.add_option("--manifest", manifest, "manifest path (default: <out>.manifest.json)");
    }

    int run(const CLI::App& sub, Context& ctx) const {
        RunManifest m("classify");
        record_parameters(sub, m);
        const auto weights = model.load(m, false);
        ClassificationTable table;
        {
            auto phase = m.phase("classify");
            table = classify_model(weights, tau);
        }
        for (const auto& w : degenerate_warning(table)) ctx.err << w << '\n';
        {
            std::ofstream f(out, std::ios::binary);
            if (!f) throw DataError("cannot write '" + out + "'");
            write_classification_csv(f, table);
        }
        m.output(out);
        m.write(manifest_path(manifest, out, "classify"));
        ctx.out << fmt::format("classified {} neurons in {} layers of {} -> {}\n", table.records.size(),
                               table.n_layers, table.model, out);
        return kExitOk;
    }
};

// ------------------------------------------------------------------- stats

struct StatsCmd {
    std::string classes;
    std::string roles;
    std::string model;
    double tau = kDefaultTau;
    std::string out;
    std::string manifest;

    void add_to(CLI::App& sub) {
        sub.add_option("--classes", classes, "classification CSV from `classify`")
            ->required()
            ->check(CLI::ExistingFile);
        sub.add_option("--roles", roles, "roles CSV from `roles`; adds the IO class x role table")
            ->check(CLI::ExistingFile);
        sub.add_option("--model", model, "model name recorded in the report (default: CSV file stem)");
        sub.add_option("--tau", tau, "threshold the CSV was produced with")->capture_default_str();
        sub.add_option("--out", out, "report JSON to write")->required();
        sub.add_option("--manifest", manifest, "manifest path (default: <out>.manifest.json)");
    }

    int run(const CLI::App& sub, Context& ctx) const {
        RunManifest m("stats");
        record_parameters(sub, m);
        m.input(classes);
        auto table = read_classification_csv(fs::path(classes), tau);
        if (!model.empty()) table.model = model;
        std::optional<RoleTable> role_table;
        if (!roles.empty()) {
            m.input(roles);
            role_table = read_roles_csv(fs::path(roles));
        }
        Report report;
        {
            auto phase = m.phase("stats");
            report = build_report(table, role_table ? &*role_table : nullptr);
        }
        write_text(out, to_json(report).dump(2) + "\n");
        m.output(out);
        m.write(manifest_path(manifest, out, "stats"));
        ctx.out << fmt::format("report for {} ({} layers) -> {}\n", report.model, report.n_layers, out);
        return kExitOk;
    }
};

// ------------------------------------------------------------------- roles

struct RolesCmd {
    ModelArgs model;
    double tau = kDefaultTau;
    RoleParams params;
    std::string bos_keys;
    std::string out;
    std::string manifest;

    void add_to(CLI::App& sub) {
        model.add_to(sub);
        sub.add_option("--tau", tau, "alignment threshold for the IO classification")->capture_default_str();
        sub.add_option("--partition-n", params.partition_n, "size of the high-variance partition set")
            ->capture_default_str();
        sub.add_option("--null-k", params.null_k, "number of trailing singular directions spanning the null space")
            ->capture_default_str();
        sub.add_option("--entropy-n", params.entropy_n, "last-layer neurons tagged as entropy neurons")
            ->capture_default_str();
        sub.add_option("--attention-cutoff", params.attention_cutoff, "|score| needed for attention roles")
            ->capture_default_str();
        sub.add_option("--kurtosis-floor", params.kurtosis_floor, "kurtosis cutoff used when the partition is empty")
            ->capture_default_str();
        sub.add_option("--bos-keys", bos_keys, "JSON file of BOS key vectors per layer.head")
            ->check(CLI::ExistingFile);
        sub.add_option("--out", out, "roles CSV to write")->required();
        sub.add_option("--manifest", manifest, "manifest path (default: <out>.manifest.json)");
    }

    int run(const CLI::App& sub, Context& ctx) const {
        RunManifest m("roles");
        record_parameters(sub, m);
        const auto weights = model.load(m, true, bos_keys);
        ClassificationTable io;
        {
            auto phase = m.phase("classify");
            io = classify_model(weights, tau);
        }
        for (const auto& w : degenerate_warning(io)) ctx.err << w << '\n';
        RoleTable table;
        {
            auto phase = m.phase("roles");
            table = assign_roles(weights, io, params);
        }
        if (!table.attention_available) {
            ctx.err << "warning: no query weights or BOS keys; attention roles were not assigned\n";
        }
        {
            std::ofstream f(out, std::ios::binary);
            if (!f) throw DataError("cannot write '" + out + "'");
            write_roles_csv(f, table);
        }
        m.output(out);
        m.write(manifest_path(manifest, out, "roles"));
        const auto totals = table.totals();
        ctx.out << fmt::format("variance cutoff {:.6g}, kurtosis cutoff {:.6g}\n", table.variance_cutoff,
                               table.kurtosis_cutoff);
        for (std::size_t r = 0; r < kAllRoles.size(); ++r) {
            ctx.out << fmt::format("{:<22} {}\n", to_string(kAllRoles[r]), totals[r]);
        }
        return kExitOk;
    }
};

// ----------------------------------------------------------------- project

struct ProjectCmd {
    ModelArgs model;
    std::string neuron;
    std::string vector = "out";
    std::size_t top_k = 10;
    std::string basis = "unembed";
    std::string direction = "positive";
    std::string vocab;
    std::string out;
    std::string manifest;

    void add_to(CLI::App& sub) {
        model.add_to(sub);
        sub.add_option("--neuron", neuron, "neuron id as LAYER.INDEX")->required();
        sub.add_option("--vector", vector, "weight vector to project")
            ->capture_default_str()
            ->check(CLI::IsMember({"gate", "in", "out"}));
        sub.add_option("--top-k", top_k, "number of tokens to list")->capture_default_str();
        sub.add_option("--basis", basis, "token matrix to compare against")
            ->capture_default_str()
            ->check(CLI::IsMember({"unembed", "embed"}));
        sub.add_option("--direction", direction, "positive: highest cosines; negative: lowest")
            ->capture_default_str()
            ->check(CLI::IsMember({"positive", "negative"}));
        sub.add_option("--vocab", vocab, "token list (JSON array or one token per line)")
            ->required()
            ->check(CLI::ExistingFile);
        sub.add_option("--out", out, "JSON file to write (default: stdout)");
        sub.add_option("--manifest", manifest, "manifest path (default: <out>.manifest.json)");
    }

    int run(const CLI::App& sub, Context& ctx) const {
        RunManifest m("project");
        record_parameters(sub, m);
        const NeuronId id = NeuronId::parse(neuron);
        const auto weights = model.load(m, false);
        m.input(vocab);
        const auto tokens = load_vocab(vocab);
        for (const auto& w : check_vocab(weights, tokens)) ctx.err << "warning: " << w << '\n';
        const WeightTriple t = neuron_triple(weights, id);
        const auto w = vector == "gate" ? t.gate : vector == "in" ? t.in : t.out;
        TokenRanking ranking;
        {
            auto phase = m.phase("project");
            ranking = top_tokens(w, weights, tokens, top_k, parse_direction(direction), parse_basis(basis));
        }
        const std::string text = to_json(ranking, id.str(), vector).dump(2) + "\n";
        if (out.empty()) {
            ctx.out << text;
        } else {
            write_text(out, text);
            m.output(out);
        }
        m.write(manifest_path(manifest, out, "project"));
        return kExitOk;
    }
};

// -------------------------------------------------------------------- plot

struct PlotCmd {
    std::string kind;
    std::vector<std::string> inputs;
    std::string out;
    std::vector<std::size_t> layers;
    std::size_t max_points = 20000;
    std::uint64_t seed = 0;
    std::string title;
    double tau = kDefaultTau;
    std::string manifest;

    void add_to(CLI::App& sub) {
        sub.add_option("--kind", kind, "bars, box, scatter or medians")->required();
        sub.add_option("--in", inputs, "stats report JSON or classification CSV; repeat for medians")
            ->required()
            ->check(CLI::ExistingFile);
        sub.add_option("--out", out, "SVG file to write; the plotted data goes to the same name with .csv")
            ->required();
        sub.add_option("--layers", layers, "restrict to these layers")->delimiter(',');
        sub.add_option("--max-points", max_points, "scatter points per layer before sampling")
            ->capture_default_str();
        sub.add_option("--seed", seed, "sampling seed for scatter")->capture_default_str();
        sub.add_option("--title", title, "figure title");
        sub.add_option("--tau", tau, "threshold recorded when a CSV input is summarised")->capture_default_str();
        sub.add_option("--manifest", manifest, "manifest path (default: <out>.manifest.json)");
    }

    int run(const CLI::App& sub, Context& ctx) const {
        RunManifest m("plot");
        record_parameters(sub, m);
        PlotSpec spec;
        spec.kind = parse_plot_kind(kind);
        if (!layers.empty()) spec.layers = layers;
        spec.max_points_per_layer = max_points;
        spec.seed = seed;
        spec.title = title;

        PlotData data;
        std::vector<ClassificationTable> tables;
        tables.reserve(inputs.size());
        for (const auto& in : inputs) {
            m.input(in);
            if (fs::path(in).extension() == ".json") {
                std::ifstream f(in);
                if (!f) throw DataError("cannot open '" + in + "'");
                data.reports.push_back(report_from_json(nlohmann::json::parse(f)));
            } else {
                tables.push_back(read_classification_csv(fs::path(in), tau));
                data.reports.push_back(build_report(tables.back()));
            }
        }
        if (spec.kind == PlotKind::scatter) {
            if (tables.empty()) throw UsageError("scatter needs a classification CSV as --in");
            data.classes = &tables.front();
        }
        std::string svg;
        std::string csv;
        {
            auto phase = m.phase("render");
            svg = render(spec, data);
            csv = plot_data_csv(spec, data);
        }
        const fs::path csv_path = fs::path(out).replace_extension(".csv");
        write_text(out, svg);
        write_text(csv_path, csv);
        m.output(out);
        m.output(csv_path);
        m.write(manifest_path(manifest, out, "plot"));
        ctx.out << fmt::format("{} plot -> {} (data: {})\n", kind, out, csv_path.string());
        return kExitOk;
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    std::string scenario;
    std::string out;
    std::string manifest;

    void add_to(CLI::App& sub) {
        sub.add_option("--scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
        sub.add_option("--out", out, "JSON file to write (default: stdout)");
        sub.add_option("--manifest", manifest, "manifest path (default: <out>.manifest.json)");
    }

    int run(const CLI::App& sub, Context& ctx) const {
        RunManifest m("simulate");
        record_parameters(sub, m);
        m.input(scenario);
        std::ifstream f(scenario);
        if (!f) throw DataError("cannot open '" + scenario + "'");
        nlohmann::json result;
        {
            auto phase = m.phase("simulate");
            result = run_scenario(nlohmann::json::parse(f));
        }
        const std::string text = result.dump(2) + "\n";
        if (out.empty()) {
            ctx.out << text;
        } else {
            write_text(out, text);
            m.output(out);
        }
        m.write(manifest_path(manifest, out, "simulate"));
        return kExitOk;
    }
};

// ----------------------------------------------------------------- fixture

struct FixtureCmd {
    std::string out;
    std::string kind = "prototype";
    std::string preset = "llama";
    PrototypeModelSpec spec;
    std::size_t d_mlp = 64;
    std::string manifest;

    void add_to(CLI::App& sub) {
        sub.add_option("--out", out, "directory to create")->required();
        sub.add_option("--kind", kind, "prototype: planted IO classes; gaussian: i.i.d. weights")
            ->capture_default_str()
            ->check(CLI::IsMember({"prototype", "gaussian"}));
        sub.add_option("--preset", preset, "tensor naming to write")->capture_default_str();
        sub.add_option("--layers", spec.n_layers, "number of layers")->capture_default_str();
        sub.add_option("--per-class", spec.per_class, "prototype neurons per base class and layer")
            ->capture_default_str();
        sub.add_option("--d-mlp", d_mlp, "neurons per layer for --kind gaussian")->capture_default_str();
        sub.add_option("--d-model", spec.d_model, "residual width")->capture_default_str();
        sub.add_option("--d-vocab", spec.d_vocab, "vocabulary size; 0 writes no unembedding")->capture_default_str();
        sub.add_option("--seed", spec.seed, "generator seed")->capture_default_str();
        sub.add_option("--manifest", manifest, "manifest path (default: <out>.manifest.json)");
    }

    int run(const CLI::App& sub, Context& ctx) const {
        RunManifest m("fixture");
        record_parameters(sub, m);
        const Preset p = builtin_preset(preset);
        ModelWeights model = kind == "gaussian"
                                 ? make_gaussian_model(spec.n_layers, d_mlp, spec.d_model, spec.d_vocab, spec.seed)
                                 : make_prototype_model(spec);
        fs::create_directories(out);
        save_model(out, model, p);
        if (spec.d_vocab > 0) {
            nlohmann::json tokens = nlohmann::json::array();
            for (std::size_t t = 0; t < spec.d_vocab; ++t) tokens.push_back(fmt::format("tok{}", t));
            write_text(fs::path(out) / "vocab.json", tokens.dump() + "\n");
        }
        m.output(fs::path(out) / "model.safetensors");
        if (spec.d_vocab > 0) m.output(fs::path(out) / "vocab.json");
        m.write(manifest_path(manifest, out, "fixture"));
        ctx.out << fmt::format("wrote {}-layer {} fixture to {}\n", model.meta.n_layers, kind, out);
        return kExitOk;
    }
};

int report_error(Context& ctx, int code, std::string_view what) {
    ctx.err << "neuron-io: error: " << what << '\n';
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{out, err};
    CLI::App app{"Weight-based IO classification of gated MLP neurons", "neuron-io"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    ClassifyCmd classify;
    StatsCmd stats;
    RolesCmd roles;
    ProjectCmd project;
    PlotCmd plot;
    SimulateCmd simulate;
    FixtureCmd fixture;

    std::vector<std::pair<CLI::App*, std::function<int(const CLI::App&, Context&)>>> commands;
    auto add = [&](auto& cmd, const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        cmd.add_to(*sub);
        commands.emplace_back(sub, [&cmd](const CLI::App& s, Context& c) { return cmd.run(s, c); });
    };
    add(classify, "classify", "classify every neuron of a checkpoint into IO classes");
    add(stats, "stats", "per-layer class shares, cosine box statistics and median curve");
    add(roles, "roles", "assign functional roles (prediction, suppression, partition, ...)");
    add(project, "project", "rank vocabulary tokens by cosine to a neuron weight vector");
    add(plot, "plot", "render an SVG figure from reports or classifications");
    add(simulate, "simulate", "evaluate a gated neuron on given inputs");
    add(fixture, "fixture", "write a small synthetic checkpoint");

    if (!args.empty() && !args.front().starts_with('-') && !app.get_subcommand_no_throw(args.front())) {
        err << "neuron-io: unknown subcommand '" << args.front() << "'\n\n" << app.help();
        return kExitUsage;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "neuron-io: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        for (auto& [sub, fn] : commands) {
            if (sub->parsed()) return fn(*sub, ctx);
        }
        return report_error(ctx, kExitUsage, "no subcommand given");
    } catch (const UsageError& e) {
        return report_error(ctx, kExitUsage, e.what());
    } catch (const NumericalError& e) {
        return report_error(ctx, kExitNumerical, e.what());
    } catch (const DataError& e) {
        return report_error(ctx, kExitData, e.what());
    } catch (const nlohmann::json::exception& e) {
        return report_error(ctx, kExitData, std::string("malformed JSON: ") + e.what());
    } catch (const fs::filesystem_error& e) {
        return report_error(ctx, kExitData, e.what());
    } catch (const std::exception& e) {
        return report_error(ctx, kExitData, e.what());
    }
}

}  // namespace neuron_io::cli
