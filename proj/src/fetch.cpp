#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "sarahbb/fetch.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <httplib.h>

#include "sarahbb/kvfile.hpp"

namespace sarahbb {

namespace {

const char* kLibsvmBase =
    "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/";

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

DatasetSource dataset_source(const std::string& name,
                             const std::filesystem::path* config_file) {
  DatasetSource src;
  if (name == "a8a" || name == "w8a" || name == "ijcnn1")
    src.url = std::string(kLibsvmBase) + name;
  if (config_file) {
    KvFile cfg = KvFile::parse_file(*config_file);
    const KvFile::Section* root = cfg.find("");
    if (root) {
      if (auto u = KvFile::get(*root, name + ".url")) src.url = *u;
      if (auto h = KvFile::get(*root, name + ".sha256")) src.sha256 = *h;
      src.bytes = KvFile::get_u64(*root, name + ".bytes", src.bytes);
    }
  }
  if (src.url.empty())
    throw FetchError("no download URL configured for dataset '" + name + "'",
                     false);
  return src;
}

std::filesystem::path cache_path(const std::string& name,
                                 const std::filesystem::path& cache_dir) {
  return cache_dir / (name + ".libsvm");
}

bool is_cached(const std::string& name,
               const std::filesystem::path& cache_dir) {
  std::error_code ec;
  return std::filesystem::exists(cache_path(name, cache_dir), ec);
}

namespace {

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. https://host or http://host:8080
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos)
    throw FetchError("malformed URL: " + url, false);
  std::size_t path_start = url.find('/', scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string download(const DatasetSource& src) {
  ParsedUrl u = split_url(src.url);
  httplib::Client client(u.scheme_host_port);
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  auto res = client.Get(u.path);
  if (!res)
    throw FetchError("download failed for " + src.url + ": " +
                         httplib::to_string(res.error()),
                     true);
  if (res->status != 200)
    throw FetchError("download failed for " + src.url + ": HTTP " +
                         std::to_string(res->status),
                     true);
  return res->body;
}

}  // namespace

FetchResult fetch_to_cache(const std::string& name,
                           const std::filesystem::path& cache_dir,
                           const std::filesystem::path* config_file) {
  std::filesystem::path target = cache_path(name, cache_dir);
  if (std::filesystem::exists(target)) return {target, true};

  DatasetSource src = dataset_source(name, config_file);
  std::string body = download(src);

  if (src.bytes != 0 && body.size() != src.bytes)
    throw FetchError("length mismatch for " + name + ": got " +
                         std::to_string(body.size()) + ", expected " +
                         std::to_string(src.bytes),
                     false);
  if (!src.sha256.empty()) {
    std::string got = sha256_hex(body);
    if (got != src.sha256)
      throw FetchError("checksum mismatch for " + name + ": got " + got, false);
  }

  std::filesystem::create_directories(cache_dir);
  // temp-then-rename so concurrent fetchers never observe a partial file
  std::filesystem::path tmp =
      target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw FetchError("cannot write " + tmp.string(), false);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw FetchError("short write to " + tmp.string(), false);
  }
  std::filesystem::rename(tmp, target);
  return {target, false};
}

Dataset fetch_dataset(const std::string& name,
                      const std::filesystem::path& cache_dir,
                      const std::filesystem::path* config_file,
                      const ParseOptions& opts) {
  FetchResult r = fetch_to_cache(name, cache_dir, config_file);
  std::ifstream in(r.path);
  if (!in) throw FetchError("cannot open cached " + r.path.string(), false);
  return parse_libsvm(in, name, opts);
}

}  // namespace sarahbb
