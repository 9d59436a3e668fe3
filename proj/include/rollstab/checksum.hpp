// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace rollstab {

// Lower-case hex SHA-256 digests.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct ManifestEntry {
  std::string name;  // path relative to the output directory
  std::size_t bytes = 0;
  std::string sha256;
};

// Hashes every regular file under dir (recursively, sorted by name) except
// the manifest itself and writes dir/manifest.json. Returns the entries.
std::vector<ManifestEntry> write_manifest(const std::string& dir);
// Recomputes the digests and returns the names whose content changed or vanished.
std::vector<std::string> verify_manifest(const std::string& dir);

}  // namespace rollstab
