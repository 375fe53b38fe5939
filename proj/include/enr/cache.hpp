#pragma once

// Checksummed JSON cache files. Every cache entry wraps its payload with an
// FNV-1a digest of the canonical dump; a mismatch on reload raises
// CacheCorrupt instead of silently feeding bad data to the pipeline.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "enr/errors.hpp"

namespace enr {

inline std::string payload_checksum(const std::string& dump) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

inline void cache_write(const std::filesystem::path& file, const nlohmann::json& payload) {
    std::filesystem::create_directories(file.parent_path());
    std::string dump = payload.dump();
    nlohmann::json wrapped{{"checksum", payload_checksum(dump)}, {"payload", payload}};
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + file.string());
    out << wrapped.dump(2) << "\n";
}

inline bool cache_exists(const std::filesystem::path& file) {
    return std::filesystem::exists(file);
}

inline nlohmann::json cache_read(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot read cache file " + file.string());
    nlohmann::json wrapped;
    try {
        in >> wrapped;
    } catch (const nlohmann::json::exception&) {
        throw CacheCorrupt("cache file " + file.string() + " is not valid JSON");
    }
    if (!wrapped.contains("checksum") || !wrapped.contains("payload"))
        throw CacheCorrupt("cache file " + file.string() + " lacks checksum/payload");
    const nlohmann::json& payload = wrapped.at("payload");
    std::string expect = wrapped.at("checksum").get<std::string>();
    std::string got = payload_checksum(payload.dump());
    if (expect != got)
        throw CacheCorrupt("cache file " + file.string() + " failed its checksum (" + got +
                           " != recorded " + expect + ")");
    return payload;
}

} // namespace enr
