#include "sarahbb/kvfile.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace sarahbb {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

KvFile KvFile::parse(std::istream& in) {
  KvFile f;
  f.sections_.push_back({"", {}, {}});
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // '#' starts a comment anywhere on the line
    std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::runtime_error("kvfile: unterminated section at line " +
                                 std::to_string(lineno));
      f.sections_.push_back({trim(t.substr(1, t.size() - 2)), {}, {}});
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("kvfile: missing '=' at line " +
                               std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("kvfile: empty key at line " +
                               std::to_string(lineno));
    Section& sec = f.sections_.back();
    if (!sec.entries.emplace(key, value).second)
      throw std::runtime_error("kvfile: duplicate key '" + key + "' at line " +
                               std::to_string(lineno));
    sec.key_order.push_back(key);
  }
  return f;
}

KvFile KvFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse(in);
}

const KvFile::Section* KvFile::find(const std::string& name) const {
  for (const Section& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<const KvFile::Section*> KvFile::find_all_prefix(
    const std::string& prefix) const {
  std::vector<const Section*> out;
  for (const Section& s : sections_)
    if (s.name.rfind(prefix, 0) == 0) out.push_back(&s);
  return out;
}

std::optional<std::string> KvFile::get(const Section& s,
                                       const std::string& key) {
  auto it = s.entries.find(key);
  if (it == s.entries.end()) return std::nullopt;
  return it->second;
}

std::string KvFile::require(const Section& s, const std::string& key) {
  auto v = get(s, key);
  if (!v)
    throw std::runtime_error("kvfile: missing key '" + key + "' in section [" +
                             s.name + "]");
  return *v;
}

double KvFile::get_double(const Section& s, const std::string& key,
                          double fallback) {
  auto v = get(s, key);
  if (!v) return fallback;
  char* end = nullptr;
  double d = std::strtod(v->c_str(), &end);
  if (end != v->c_str() + v->size())
    throw std::runtime_error("kvfile: bad number for key '" + key + "'");
  return d;
}

std::uint64_t KvFile::get_u64(const Section& s, const std::string& key,
                              std::uint64_t fallback) {
  auto v = get(s, key);
  if (!v) return fallback;
  char* end = nullptr;
  std::uint64_t u = std::strtoull(v->c_str(), &end, 10);
  if (end != v->c_str() + v->size())
    throw std::runtime_error("kvfile: bad integer for key '" + key + "'");
  return u;
}

bool KvFile::get_bool(const Section& s, const std::string& key,
                      bool fallback) {
  auto v = get(s, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw std::runtime_error("kvfile: bad boolean for key '" + key + "'");
}

}  // namespace sarahbb
