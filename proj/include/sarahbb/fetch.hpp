#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "sarahbb/dataset.hpp"

namespace sarahbb {

class FetchError : public std::runtime_error {
 public:
  FetchError(const std::string& what, bool retriable)
      : std::runtime_error(what), retriable(retriable) {}
  // true for network failures worth retrying; false for hard errors
  // (checksum/length mismatch).
  bool retriable;
};

struct DatasetSource {
  std::string url;
  std::string sha256;          // optional, lowercase hex
  std::uint64_t bytes = 0;     // optional expected content length
};

/// Source for a named dataset: built-in defaults for a8a / w8a / ijcnn1,
/// overridable by a flat key-value config file with keys
/// `<name>.url`, `<name>.sha256`, `<name>.bytes`.
DatasetSource dataset_source(const std::string& name,
                             const std::filesystem::path* config_file);

std::filesystem::path cache_path(const std::string& name,
                                 const std::filesystem::path& cache_dir);

bool is_cached(const std::string& name,
               const std::filesystem::path& cache_dir);

struct FetchResult {
  std::filesystem::path path;
  bool cache_hit = false;
};

/// Ensures `<cache_dir>/<name>.libsvm` exists: cache hit needs no network;
/// otherwise downloads from the configured URL (verifying length/checksum if
/// configured) with a write-temp-then-rename commit.
FetchResult fetch_to_cache(const std::string& name,
                           const std::filesystem::path& cache_dir,
                           const std::filesystem::path* config_file = nullptr);

Dataset fetch_dataset(const std::string& name,
                      const std::filesystem::path& cache_dir,
                      const std::filesystem::path* config_file = nullptr,
                      const ParseOptions& opts = {});

std::string sha256_hex(const std::string& bytes);

}  // namespace sarahbb
