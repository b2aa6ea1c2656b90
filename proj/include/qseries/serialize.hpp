#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qseries/series.hpp"
#include "qseries/version.hpp"

namespace qseries {

// On-disk format "QS1": a tag line followed by JSON.  Coefficients are
// decimal strings "numerator/denominator" so payloads survive any integer
// width; grid is fixed at 24.

inline nlohmann::json series_to_json(const Series& s) {
    nlohmann::json j;
    j["version"] = format_tag;
    j["grid"] = 24;
    j["offset"] = s.offset();
    j["trunc"] = s.trunc();
    nlohmann::json coeffs = nlohmann::json::array();
    for (const Rat& c : s.coeffs()) coeffs.push_back(rat_to_fraction_string(c));
    j["coeffs"] = std::move(coeffs);
    return j;
}

inline Series series_from_json(const nlohmann::json& j) {
    if (!j.contains("version") || j.at("version").get<std::string>() != format_tag)
        throw domain_error("unsupported series format version");
    if (j.at("grid").get<int>() != 24) throw domain_error("unsupported exponent grid");
    const Exponent24 offset = j.at("offset").get<Exponent24>();
    const Exponent24 trunc = j.at("trunc").get<Exponent24>();
    std::vector<Rat> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.push_back(rat_from_string(c.get<std::string>()));
    return Series(offset, std::move(coeffs), trunc);
}

inline std::string serialize_series(const Series& s) {
    return std::string(format_tag) + "\n" + series_to_json(s).dump();
}

inline Series deserialize_series(const std::string& payload) {
    const auto newline = payload.find('\n');
    if (newline == std::string::npos || payload.substr(0, newline) != format_tag)
        throw domain_error("payload does not start with the QS1 tag");
    return series_from_json(nlohmann::json::parse(payload.substr(newline + 1)));
}

/// FNV-1a; enough to detect torn or bit-rotted cache files.
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct CacheEntry {
    std::string key;     // canonical command + parameter string
    std::string payload; // any serialized report or series
    std::string engine{engine_version};
};

namespace detail {

inline std::filesystem::path cache_path(const std::filesystem::path& dir, const std::string& key) {
    std::ostringstream name;
    name << "qs-" << std::hex << fnv1a64(key) << ".json";
    return dir / name.str();
}

} // namespace detail

inline void cache_store(const std::filesystem::path& dir, const CacheEntry& entry) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = detail::cache_path(dir, entry.key);
    nlohmann::json j;
    j["engine"] = entry.engine;
    j["key"] = entry.key;
    j["checksum"] = fnv1a64(entry.payload);
    j["payload"] = entry.payload;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache file " + path.string());
    out << j.dump();
    if (!out) throw std::runtime_error("short write to cache file " + path.string());
}

/// Returns the entry only when the engine version matches and the payload
/// checksum verifies; anything else is a miss and the caller recomputes.
inline std::optional<CacheEntry> cache_load(const std::filesystem::path& dir,
                                            const std::string& key) {
    const auto path = detail::cache_path(dir, key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        const nlohmann::json j = nlohmann::json::parse(buffer.str());
        CacheEntry entry;
        entry.engine = j.at("engine").get<std::string>();
        entry.key = j.at("key").get<std::string>();
        entry.payload = j.at("payload").get<std::string>();
        if (entry.engine != engine_version) return std::nullopt;
        if (entry.key != key) return std::nullopt;
        if (j.at("checksum").get<std::uint64_t>() != fnv1a64(entry.payload)) return std::nullopt;
        return entry;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace qseries
