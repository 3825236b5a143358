// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace neuron_io::cli {

// Hex SHA-256 of a file's bytes.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

// Records what a run read, wrote and how long each phase took. Everything
// except `started_at` and `timings` is a pure function of the inputs, so two
// runs with the same arguments on the same files differ only there.
class RunManifest {
public:
    explicit RunManifest(std::string command);

    void parameter(const std::string& key, nlohmann::json value);
    void input(const std::filesystem::path& path);
    void output(const std::filesystem::path& path);

    // Starts a named phase; the returned guard stops it on destruction.
    class Phase {
    public:
        Phase(RunManifest& owner, std::string name);
        ~Phase();
        Phase(const Phase&) = delete;
        Phase& operator=(const Phase&) = delete;

    private:
        RunManifest& owner_;
        std::string name_;
        std::chrono::steady_clock::time_point start_;
    };
    [[nodiscard]] Phase phase(std::string name) { return Phase(*this, std::move(name)); }

    [[nodiscard]] nlohmann::json to_json() const;
    void write(const std::filesystem::path& path) const;

private:
    std::string command_;
    std::string started_at_;
    nlohmann::json parameters_ = nlohmann::json::object();
    std::vector<std::filesystem::path> inputs_;
    std::vector<std::filesystem::path> outputs_;
    std::vector<std::pair<std::string, double>> timings_;
};

}  // namespace neuron_io::cli
