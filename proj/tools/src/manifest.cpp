// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#include "manifest.hpp"

#include <array>
#include <ctime>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "neuron_io/error.hpp"
#include "neuron_io/version.hpp"

namespace neuron_io::cli {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "' for checksumming");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw DataError("sha256 initialisation failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

namespace {

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec);
}

nlohmann::json file_entry(const std::filesystem::path& p) {
    nlohmann::json j;
    j["path"] = p.generic_string();
    if (std::filesystem::is_regular_file(p)) {
        j["bytes"] = std::filesystem::file_size(p);
        j["sha256"] = sha256_file(p);
    } else {
        j["bytes"] = nullptr;
        j["sha256"] = nullptr;
    }
    return j;
}

}  // namespace

RunManifest::RunManifest(std::string command) : command_(std::move(command)), started_at_(utc_now()) {}

void RunManifest::parameter(const std::string& key, nlohmann::json value) { parameters_[key] = std::move(value); }

void RunManifest::input(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(path)) {
            if (e.is_regular_file()) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (auto& f : files) inputs_.push_back(std::move(f));
        return;
    }
    inputs_.push_back(path);
}

void RunManifest::output(const std::filesystem::path& path) { outputs_.push_back(path); }

RunManifest::Phase::Phase(RunManifest& owner, std::string name)
    : owner_(owner), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

RunManifest::Phase::~Phase() {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    owner_.timings_.emplace_back(name_, dt.count());
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = "neuron-io";
    j["version"] = std::string(kVersion);
    j["command"] = command_;
    j["parameters"] = parameters_;
    j["inputs"] = nlohmann::json::array();
    for (const auto& p : inputs_) j["inputs"].push_back(file_entry(p));
    j["outputs"] = nlohmann::json::array();
    for (const auto& p : outputs_) j["outputs"].push_back(file_entry(p));
    j["started_at"] = started_at_;
    j["timings"] = nlohmann::json::object();
    for (const auto& [name, secs] : timings_) j["timings"][name] = secs;
    return j;
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
    out << to_json().dump(2) << '\n';
}

}  // namespace neuron_io::cli
