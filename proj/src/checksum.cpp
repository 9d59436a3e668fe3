// SPDX-License-Identifier: Apache-2.0
#include "rollstab/checksum.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "rollstab/error.hpp"

namespace rollstab {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.json";

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      fail(ErrorCode::numerical, "sha256: digest initialization failed");
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) fail(ErrorCode::numerical, "sha256: update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) fail(ErrorCode::numerical, "sha256: finalization failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 15]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::vector<fs::path> list_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) {
      fs::path rel = fs::relative(e.path(), dir);
      if (rel != kManifest) files.push_back(rel);
    }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "sha256: cannot open '" + path + "'");
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::vector<ManifestEntry> write_manifest(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) fail(ErrorCode::io, "manifest: '" + dir + "' is not a directory");
  std::vector<ManifestEntry> entries;
  nlohmann::json files = nlohmann::json::array();
  for (const fs::path& rel : list_files(root)) {
    ManifestEntry e;
    e.name = rel.generic_string();
    e.bytes = static_cast<std::size_t>(fs::file_size(root / rel));
    e.sha256 = sha256_file((root / rel).string());
    files.push_back({{"name", e.name}, {"bytes", e.bytes}, {"sha256", e.sha256}});
    entries.push_back(e);
  }
  std::ofstream out(root / kManifest);
  if (!out) fail(ErrorCode::io, "manifest: cannot write into '" + dir + "'");
  out << nlohmann::json{{"algorithm", "sha256"}, {"files", files}}.dump(2) << "\n";
  return entries;
}

std::vector<std::string> verify_manifest(const std::string& dir) {
  const fs::path path = fs::path(dir) / kManifest;
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "manifest: cannot read '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, std::string("manifest: malformed JSON: ") + e.what());
  }
  std::vector<std::string> bad;
  for (const auto& f : j.at("files")) {
    const std::string name = f.at("name").get<std::string>();
    const fs::path p = fs::path(dir) / name;
    if (!fs::is_regular_file(p) || sha256_file(p.string()) != f.at("sha256").get<std::string>()) bad.push_back(name);
  }
  return bad;
}

}  // namespace rollstab
