// output.hpp - CSV tables, snapshot binaries, checksums, run manifests
#pragma once

#include "hallwave/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hallwave {

struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// %.17g, so that every double survives a text round trip.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::string render() const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

// Key/value rows for scalar summaries.
std::string render_summary(const std::vector<std::pair<std::string, double>>& rows);

// 64-byte ASCII header "HWSNAP1 <nx> <ny> <count> f64le <run-id>", space padded, newline terminated,
// then count frames of nx*ny little-endian doubles in row-major order.
inline constexpr std::size_t kSnapshotHeaderBytes = 64;

struct SnapshotStack {
    int nx{0}, ny{0};
    std::string run_id;
    std::vector<std::vector<double>> frames;
};

std::string encode_snapshots(const SnapshotStack& s);
SnapshotStack decode_snapshots(const std::string& bytes);
SnapshotStack read_snapshots(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

// Derived quantities a manifest must carry, recomputed from the config.
json derived_quantities(const RunConfig& cfg);

// Returns the largest relative mismatch between stored and recomputed derived values.
double manifest_derived_mismatch(const json& manifest);

}  // namespace hallwave
