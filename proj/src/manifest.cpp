#include "smearkit/manifest.hpp"

#include <zlib.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace smearkit {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError("cannot open '" + path + "' for digest");
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ull;
        }
    }
    return hash;
}

std::string digest_hex(std::uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(digest));
    return buf;
}

std::string iso8601_utc_now() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buf;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void RunManifest::add_output(const std::string& out_dir,
                             const std::string& relative_path) {
    const std::string full = out_dir.empty()
                                 ? relative_path
                                 : out_dir + "/" + relative_path;
    outputs.push_back({relative_path, digest_hex(fnv1a64_file(full))});
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["version"] = version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = nlohmann::json::array();
    for (const Output& o : outputs)
        j["outputs"].push_back({{"path", o.path}, {"digest", o.digest}});
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        m.seed = j.at("seed").get<std::uint64_t>();
        m.version = j.at("version").get<std::string>();
        m.started_at = j.value("started_at", std::string());
        m.finished_at = j.value("finished_at", std::string());
        for (const auto& o : j.at("outputs"))
            m.outputs.push_back({o.at("path").get<std::string>(),
                                 o.at("digest").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ManifestError("cannot write manifest '" + path + "'");
    out << to_json().dump(2) << '\n';
    if (!out) throw ManifestError("short write on manifest '" + path + "'");
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("malformed manifest: ") + e.what());
    }
    return from_json(j);
}

ArtifactWriter::ArtifactWriter(const std::string& path, bool gzip)
    : path_(path) {
    if (gzip) {
        gz_ = gzopen(path.c_str(), "wb");
        if (!gz_) throw ManifestError("cannot open '" + path + "' for write");
    } else {
        file_ = std::fopen(path.c_str(), "wb");
        if (!file_) throw ManifestError("cannot open '" + path + "' for write");
    }
}

ArtifactWriter::~ArtifactWriter() {
    try {
        close();
    } catch (...) {
        // destructor must not throw; close() explicitly to see failures
    }
}

void ArtifactWriter::line(const std::string& text) {
    if (gz_) {
        gzFile gz = static_cast<gzFile>(gz_);
        if (gzwrite(gz, text.data(), static_cast<unsigned>(text.size())) !=
                static_cast<int>(text.size()) ||
            gzwrite(gz, "\n", 1) != 1)
            throw ManifestError("write failure on '" + path_ + "'");
    } else if (file_) {
        FILE* f = static_cast<FILE*>(file_);
        if (std::fwrite(text.data(), 1, text.size(), f) != text.size() ||
            std::fputc('\n', f) == EOF)
            throw ManifestError("write failure on '" + path_ + "'");
    }
}

void ArtifactWriter::close() {
    if (gz_) {
        gzFile gz = static_cast<gzFile>(gz_);
        gz_ = nullptr;
        if (gzclose(gz) != Z_OK)
            throw ManifestError("close failure on '" + path_ + "'");
    }
    if (file_) {
        FILE* f = static_cast<FILE*>(file_);
        file_ = nullptr;
        if (std::fclose(f) != 0)
            throw ManifestError("close failure on '" + path_ + "'");
    }
}

}  // namespace smearkit
