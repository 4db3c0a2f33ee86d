#include "dcw/defaults.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

#include "json.hpp"

namespace dcw {

namespace {

const nlohmann::json& parsed_defaults() {
  static const nlohmann::json doc = nlohmann::json::parse(defaults_json_text());
  return doc;
}

}  // namespace

std::string defaults_sha1() {
  const char* text = defaults_json_text();
  const std::size_t len = std::strlen(text);
  const std::string header = "blob " + std::to_string(len) + '\0';

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
            EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
            EVP_DigestUpdate(ctx, text, len) == 1 &&
            EVP_DigestFinal_ex(ctx, digest, &digest_len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");

  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest_len);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

int defaults_version() { return parsed_defaults().at("defaults_version").get<int>(); }

int bl_family_version_default() {
  return parsed_defaults().at("bl_family_version").get<int>();
}

double default_tolerance(const std::string& name) {
  const auto& table = parsed_defaults().at("tolerances");
  if (!table.contains(name)) {
    throw std::out_of_range("unknown tolerance key: " + name);
  }
  return table.at(name).get<double>();
}

double chain_default(const std::string& name) {
  const auto& table = parsed_defaults().at("chain");
  if (!table.contains(name)) {
    throw std::out_of_range("unknown chain default key: " + name);
  }
  return table.at(name).get<double>();
}

}  // namespace dcw
