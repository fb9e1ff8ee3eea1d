#pragma once

// Binary container used by parameter checkpoints, meta checkpoints and
// dataset caches:
//
//   bytes 0..7   magic "CAMELBLB"
//   bytes 8..11  u32 LE version (1)
//   bytes 12..15 u32 LE header length H
//   bytes 16..   H bytes of UTF-8 JSON header
//   then         payload: little-endian float32 array
//
// The header's "blobs" array names sub-ranges of the payload by (offset,
// count) in floats; "meta" carries format-specific JSON. Floats are written
// raw, so a round-trip is bit-exact.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "camel/errors.hpp"

static_assert(std::endian::native == std::endian::little, "little-endian host required");

namespace camel::blobio {

struct BlobFile {
    nlohmann::ordered_json meta;
    std::vector<std::pair<std::string, std::vector<float>>> blobs;

    const std::vector<float>& blob(const std::string& name) const {
        for (const auto& [n, v] : blobs)
            if (n == name) return v;
        throw DataError("blob file: missing blob " + name);
    }
    bool has_blob(const std::string& name) const {
        for (const auto& [n, v] : blobs)
            if (n == name) return true;
        return false;
    }
};

inline void write_blob_file(const std::string& path, const BlobFile& bf) {
    nlohmann::ordered_json header;
    header["meta"] = bf.meta;
    header["blobs"] = nlohmann::ordered_json::array();
    size_t off = 0;
    for (const auto& [name, values] : bf.blobs) {
        header["blobs"].push_back({{"name", name}, {"offset", off}, {"count", values.size()}});
        off += values.size();
    }
    const std::string hs = header.dump();

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("blob file: cannot open for writing: " + path);
    f.write("CAMELBLB", 8);
    const uint32_t version = 1;
    const uint32_t hlen = static_cast<uint32_t>(hs.size());
    f.write(reinterpret_cast<const char*>(&version), 4);
    f.write(reinterpret_cast<const char*>(&hlen), 4);
    f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& [name, values] : bf.blobs)
        f.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 4));
    if (!f) throw DataError("blob file: write failed: " + path);
}

inline BlobFile read_blob_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("blob file: cannot open: " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, "CAMELBLB", 8) != 0) throw DataError("blob file: bad magic: " + path);
    uint32_t version = 0, hlen = 0;
    f.read(reinterpret_cast<char*>(&version), 4);
    f.read(reinterpret_cast<char*>(&hlen), 4);
    if (!f || version != 1) throw DataError("blob file: unsupported version: " + path);
    std::string hs(hlen, '\0');
    f.read(hs.data(), hlen);
    if (!f) throw DataError("blob file: truncated header: " + path);
    nlohmann::ordered_json header;
    try {
        header = nlohmann::ordered_json::parse(hs);
    } catch (const std::exception& e) {
        throw DataError(std::string("blob file: header parse error: ") + e.what());
    }

    BlobFile bf;
    bf.meta = header.value("meta", nlohmann::ordered_json::object());
    for (const auto& b : header.at("blobs")) {
        const size_t count = b.at("count").get<size_t>();
        std::vector<float> values(count);
        f.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * 4));
        if (!f) throw DataError("blob file: truncated payload: " + path);
        bf.blobs.emplace_back(b.at("name").get<std::string>(), std::move(values));
    }
    return bf;
}

}  // namespace camel::blobio
