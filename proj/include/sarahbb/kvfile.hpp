#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sarahbb {

/// Flat-section key-value text:
///   # comment
///   key = value            (before any section header: the "" section)
///   [section name]
///   key = value            # '#' starts a comment anywhere on a line
/// Section order is preserved; duplicate keys within a section are an error.
/// Values therefore cannot contain '#'.
class KvFile {
 public:
  struct Section {
    std::string name;
    std::map<std::string, std::string> entries;
    std::vector<std::string> key_order;
  };

  static KvFile parse(std::istream& in);
  static KvFile parse_file(const std::filesystem::path& path);

  const std::vector<Section>& sections() const { return sections_; }
  const Section* find(const std::string& name) const;
  std::vector<const Section*> find_all_prefix(const std::string& prefix) const;

  static std::optional<std::string> get(const Section& s,
                                        const std::string& key);
  static std::string require(const Section& s, const std::string& key);
  static double get_double(const Section& s, const std::string& key,
                           double fallback);
  static std::uint64_t get_u64(const Section& s, const std::string& key,
                               std::uint64_t fallback);
  static bool get_bool(const Section& s, const std::string& key,
                       bool fallback);

 private:
  std::vector<Section> sections_;
};

}  // namespace sarahbb
