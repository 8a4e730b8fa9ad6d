// Run manifests and artifact writers. Every CLI run records its resolved
// configuration plus a digest of each file it wrote; re-running from the
// manifest must reproduce those digests byte for byte. Timestamps live only
// in the manifest, never in the data files, so digests stay stable.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace smearkit {

inline constexpr const char* kToolVersion = "0.1.0";

class ManifestError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// FNV-1a, 64-bit. Not cryptographic; detects accidental drift.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::string& path);  // throws ManifestError
std::string digest_hex(std::uint64_t digest);

std::string iso8601_utc_now();

// Shortest round-trip decimal form of a double; deterministic for a given
// build, parses back to the identical bit pattern.
std::string format_double(double value);

struct RunManifest {
    std::string command;
    nlohmann::json config;  // every flag, resolved to its final value
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
    std::string started_at;
    std::string finished_at;

    struct Output {
        std::string path;  // relative to the output directory
        std::string digest;
    };
    std::vector<Output> outputs;

    // Digests out_dir/relative_path and appends it to outputs.
    void add_output(const std::string& out_dir,
                    const std::string& relative_path);

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);

    void write(const std::string& path) const;
    static RunManifest load(const std::string& path);
};

// Line-oriented writer for CSV artifacts, optionally gzip-compressed.
// Content passes through unmodified; callers format rows themselves.
class ArtifactWriter {
  public:
    ArtifactWriter(const std::string& path, bool gzip);
    ~ArtifactWriter();
    ArtifactWriter(const ArtifactWriter&) = delete;
    ArtifactWriter& operator=(const ArtifactWriter&) = delete;

    void line(const std::string& text);  // appends '\n'
    void close();                        // flushes; throws on write failure

  private:
    void* gz_ = nullptr;    // gzFile when gzip
    void* file_ = nullptr;  // FILE* otherwise
    std::string path_;
};

}  // namespace smearkit
