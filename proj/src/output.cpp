#include "hallwave/output.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hallwave {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvTable::render() const {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns) {
        if (col.size() != rows) throw OutputError("CSV columns of unequal length");
    }
    if (columns.size() != header.size()) throw OutputError("CSV header/column count mismatch");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += format_double(columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw OutputError("empty CSV");
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) t.header.push_back(cell);
    }
    t.columns.assign(t.header.size(), {});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream r(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(r, cell, ',')) {
            if (c >= t.columns.size()) throw OutputError("CSV row wider than header");
            t.columns[c++].push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (c != t.columns.size()) throw OutputError("CSV row narrower than header");
    }
    return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path)); }

std::string render_summary(const std::vector<std::pair<std::string, double>>& rows) {
    std::string out = "key,value\n";
    for (const auto& [k, v] : rows) out += k + "," + format_double(v) + "\n";
    return out;
}

std::string encode_snapshots(const SnapshotStack& s) {
    const std::size_t frame = static_cast<std::size_t>(s.nx) * s.ny;
    char header[kSnapshotHeaderBytes + 1];
    const int n = std::snprintf(header, sizeof header, "HWSNAP1 %d %d %zu f64le %s", s.nx, s.ny, s.frames.size(),
                                s.run_id.c_str());
    if (n < 0 || static_cast<std::size_t>(n) > kSnapshotHeaderBytes - 1) {
        throw OutputError("snapshot header longer than 63 bytes; shorten the run id");
    }
    std::string out(header, n);
    out.resize(kSnapshotHeaderBytes - 1, ' ');
    out += '\n';
    out.reserve(kSnapshotHeaderBytes + s.frames.size() * frame * 8);
    for (const auto& f : s.frames) {
        if (f.size() != frame) throw OutputError("snapshot frame size differs from nx*ny");
        for (double v : f) {
            auto bits = std::bit_cast<std::uint64_t>(v);
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
            char b[8];
            std::memcpy(b, &bits, 8);
            out.append(b, 8);
        }
    }
    return out;
}

SnapshotStack decode_snapshots(const std::string& bytes) {
    if (bytes.size() < kSnapshotHeaderBytes) throw OutputError("snapshot file shorter than its header");
    std::istringstream h(bytes.substr(0, kSnapshotHeaderBytes));
    std::string magic, type;
    SnapshotStack s;
    std::size_t count = 0;
    h >> magic >> s.nx >> s.ny >> count >> type >> s.run_id;
    if (magic != "HWSNAP1") throw OutputError("bad snapshot magic '" + magic + "'");
    if (type != "f64le") throw OutputError("unsupported snapshot element type '" + type + "'");
    const std::size_t frame = static_cast<std::size_t>(s.nx) * s.ny;
    if (bytes.size() != kSnapshotHeaderBytes + count * frame * 8) {
        throw OutputError("snapshot payload size does not match header");
    }
    const char* p = bytes.data() + kSnapshotHeaderBytes;
    s.frames.assign(count, std::vector<double>(frame));
    for (auto& f : s.frames) {
        for (double& v : f) {
            std::uint64_t bits;
            std::memcpy(&bits, p, 8);
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
            v = std::bit_cast<double>(bits);
            p += 8;
        }
    }
    return s;
}

SnapshotStack read_snapshots(const fs::path& path) { return decode_snapshots(read_file(path)); }

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw OutputError("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OutputError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw OutputError("cannot write " + tmp.string() + " (output directory not writable?)");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw OutputError("short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw OutputError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

json derived_quantities(const RunConfig& cfg) {
    const auto p = LandauAnalytics::make(cfg.lattice.alpha, linear_U0(cfg.lattice.potential));
    return {{"alpha", p.alpha}, {"U0", p.U0},     {"l_B", p.l_B},     {"omega_B", p.omega_B},
            {"U_B", p.U_B},     {"c_H", p.c_H},   {"omega_0_LL", p.level(0)}};
}

namespace {

double rel(double a, double b) {
    if (a == b) return 0.0;
    const double s = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) / s;
}

}  // namespace

double manifest_derived_mismatch(const json& manifest) {
    const auto cfg = parse_config(manifest.at("config"));
    const auto& stored = manifest.at("derived");
    const auto fresh = derived_quantities(cfg);
    double worst = 0;
    for (auto it = fresh.begin(); it != fresh.end(); ++it) {
        worst = std::max(worst, rel(stored.at(it.key()).get<double>(), it.value().get<double>()));
    }
    if (stored.contains("emitters")) {
        const double alpha = cfg.lattice.alpha;
        for (const auto& e : stored.at("emitters")) {
            const double g = e.at("g").get<double>();
            const double ub = e.at("U_B_local").get<double>();
            if (!(ub > 0)) continue;
            const double gamma = markov_rate(g, alpha, ub, e.at("delta").get<double>());
            worst = std::max(worst, rel(e.at("gamma_e").get<double>(), gamma));
            if (e.at("regime").get<std::string>() != to_string(classify_regime(g, alpha, ub).regime)) {
                worst = std::max(worst, 1.0);
            }
        }
    }
    return worst;
}

}  // namespace hallwave
