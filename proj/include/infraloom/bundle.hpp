#pragma once

// Deployment bundle: a stored (uncompressed) zip archive with fixed
// timestamps plus a manifest of SHA-256 digests. Equal inputs give
// byte-identical outputs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>
#include <zlib.h>

#include <json.hpp>

#include "infraloom/error.hpp"

namespace infraloom::bundle {

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("DigestFailed", "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

struct ZipEntry {
  std::string name;
  std::string data;
};

namespace detail {

inline void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

inline void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace detail

// Entries are written in the given order with DOS date 1980-01-01 00:00.
inline std::string write_zip(const std::vector<ZipEntry>& entries) {
  using detail::put16;
  using detail::put32;
  constexpr std::uint16_t kVersion = 20;
  constexpr std::uint16_t kDosTime = 0;
  constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;

  std::string out;
  std::string central;
  for (const auto& e : entries) {
    if (e.data.size() > 0xFFFFFFFFu || out.size() > 0xFFFFFFFFu) {
      throw Error("BundleTooLarge", "zip64 archives are not supported");
    }
    auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(e.data.data()), static_cast<uInt>(e.data.size())));
    auto size = static_cast<std::uint32_t>(e.data.size());
    auto offset = static_cast<std::uint32_t>(out.size());

    put32(out, 0x04034b50);
    put16(out, kVersion);
    put16(out, 0);  // flags
    put16(out, 0);  // stored
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, static_cast<std::uint16_t>(e.name.size()));
    put16(out, 0);
    out += e.name;
    out += e.data;

    put32(central, 0x02014b50);
    put16(central, kVersion);
    put16(central, kVersion);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosTime);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, static_cast<std::uint16_t>(e.name.size()));
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attributes
    put32(central, 0);  // external attributes
    put32(central, offset);
    central += e.name;
  }
  auto central_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, central_offset);
  put16(out, 0);
  return out;
}

struct ManifestEntry {
  std::string logical_name;
  std::string source_path;
  std::string sha256;

  bool operator==(const ManifestEntry&) const = default;
};

struct BundleManifest {
  // Sorted by logical_name.
  std::vector<ManifestEntry> entries;
  std::string schema_digest;

  bool operator==(const BundleManifest&) const = default;
};

inline std::string render_manifest(const BundleManifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"logical_name", e.logical_name}, {"source_path", e.source_path}, {"sha256", e.sha256}});
  }
  nlohmann::json j = {{"entries", entries}, {"schema_digest", m.schema_digest}};
  return j.dump(2) + "\n";
}

inline BundleManifest parse_manifest(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    BundleManifest m;
    m.schema_digest = j.at("schema_digest").get<std::string>();
    for (const auto& e : j.at("entries")) {
      m.entries.push_back({e.at("logical_name").get<std::string>(), e.at("source_path").get<std::string>(),
                           e.at("sha256").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("MalformedManifest", std::string("MalformedManifest: ") + e.what());
  }
}

}  // namespace infraloom::bundle
