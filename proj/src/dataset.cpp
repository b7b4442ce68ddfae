#include "sarahbb/dataset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sarahbb/rng.hpp"

namespace sarahbb {

Dataset::Dataset(std::string name, std::size_t dim,
                 std::vector<Example> examples)
    : name_(std::move(name)), dim_(dim), examples_(std::move(examples)) {
  if (examples_.empty()) throw std::invalid_argument("Dataset: n must be >= 1");
  for (const Example& ex : examples_) {
    if (ex.features.dim() != dim_)
      throw std::invalid_argument("Dataset: row dimension mismatch");
  }
}

namespace {

inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::uint64_t Dataset::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::uint64_t dim64 = dim_;
  h = fnv1a(h, &dim64, sizeof dim64);
  for (const Example& ex : examples_) {
    h = fnv1a(h, &ex.label, sizeof ex.label);
    const auto& idx = ex.features.indices();
    const auto& val = ex.features.values();
    if (!idx.empty()) {
      h = fnv1a(h, idx.data(), idx.size() * sizeof idx[0]);
      h = fnv1a(h, val.data(), val.size() * sizeof val[0]);
    }
  }
  return h;
}

namespace {

double parse_double_token(const char* begin, const char* end, std::size_t line,
                          const char* what) {
  char buf[64];
  std::size_t len = static_cast<std::size_t>(end - begin);
  if (len == 0 || len >= sizeof buf)
    throw ParseError(std::string("malformed ") + what, line);
  std::memcpy(buf, begin, len);
  buf[len] = '\0';
  char* tail = nullptr;
  double v = std::strtod(buf, &tail);
  if (tail != buf + len)
    throw ParseError(std::string("malformed ") + what, line);
  return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const std::string& name,
                     const ParseOptions& opts) {
  struct RawRow {
    double label;
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
  };
  std::vector<RawRow> rows;
  std::size_t max_index = 0;  // 1-based
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char* p = line.c_str();
    const char* end = p + line.size();
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (p == end) continue;

    const char* tok = p;
    while (p < end && !std::isspace(static_cast<unsigned char>(*p))) ++p;
    RawRow row;
    row.label = parse_double_token(tok, p, lineno, "label");
    if (opts.task == TaskKind::classification)
      row.label = row.label > 0 ? 1.0 : -1.0;

    std::size_t prev_index = 0;
    for (;;) {
      while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
      if (p == end) break;
      tok = p;
      while (p < end && !std::isspace(static_cast<unsigned char>(*p))) ++p;
      const char* colon =
          static_cast<const char*>(std::memchr(tok, ':', p - tok));
      if (colon == nullptr) throw ParseError("missing ':' in feature", lineno);
      std::size_t index = 0;
      auto [iptr, ec] = std::from_chars(tok, colon, index);
      if (ec != std::errc{} || iptr != colon || index == 0)
        throw ParseError("malformed feature index", lineno);
      if (index <= prev_index)
        throw ParseError("feature indices not strictly increasing", lineno);
      prev_index = index;
      double v = parse_double_token(colon + 1, p, lineno, "feature value");
      row.idx.push_back(static_cast<std::uint32_t>(index - 1));  // to 0-based
      row.val.push_back(v);
      max_index = std::max(max_index, index);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty file", lineno);

  std::size_t dim = opts.dim_override > 0 ? opts.dim_override : max_index;
  if (dim == 0) dim = 1;  // all rows featureless
  if (dim < max_index)
    throw ParseError("dim override smaller than max feature index", 0);
  std::vector<Example> out;
  out.reserve(rows.size());
  for (RawRow& row : rows) {
    Example e;
    e.label = row.label;
    e.features = SparseVector(dim, std::move(row.idx), std::move(row.val));
    out.push_back(std::move(e));
  }
  return Dataset(name, dim, std::move(out));
}

Dataset parse_libsvm_file(const std::filesystem::path& path,
                          const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_libsvm(in, path.stem().string(), opts);
}

void write_libsvm(const Dataset& ds, std::ostream& out) {
  char buf[40];
  for (const Example& ex : ds.examples()) {
    std::snprintf(buf, sizeof buf, "%.17g", ex.label);
    out << buf;
    const auto& idx = ex.features.indices();
    const auto& val = ex.features.values();
    for (std::size_t j = 0; j < idx.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", val[j]);
      out << ' ' << (idx[j] + 1) << ':' << buf;  // back to 1-based
    }
    out << '\n';
  }
}

NormalizeResult normalize_rows(const Dataset& ds) {
  std::vector<Example> rows;
  rows.reserve(ds.n());
  std::vector<std::size_t> zero_rows;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Example& ex = ds.example(i);
    double nsq = ex.features.norm_sq();
    Example e;
    e.label = ex.label;
    if (nsq == 0.0) {
      zero_rows.push_back(i);
      e.features = ex.features;
    } else {
      e.features = ex.features.scaled(1.0 / std::sqrt(nsq));
    }
    rows.push_back(std::move(e));
  }
  return {Dataset(ds.name(), ds.dim(), std::move(rows)), std::move(zero_rows)};
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1)
    throw std::invalid_argument("generate_synthetic: n and d must be >= 1");
  if (spec.condition_hint <= 0.0)
    throw std::invalid_argument("generate_synthetic: condition_hint <= 0");
  Rng rng(spec.seed);

  // Per-coordinate scales spread geometrically from 1 down to
  // 1/condition_hint.
  std::vector<double> scale(spec.d, 1.0);
  if (spec.d > 1) {
    for (std::size_t j = 0; j < spec.d; ++j) {
      double t = static_cast<double>(j) / static_cast<double>(spec.d - 1);
      scale[j] = std::pow(spec.condition_hint, -t);
    }
  }

  DenseVector w_true(spec.d);
  for (std::size_t j = 0; j < spec.d; ++j) w_true[j] = rng.normal();

  std::vector<Example> rows;
  rows.reserve(spec.n);
  std::vector<std::uint32_t> idx(spec.d);
  for (std::uint32_t j = 0; j < spec.d; ++j) idx[j] = j;
  std::vector<double> val(spec.d);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.d; ++j) val[j] = scale[j] * rng.normal();
    Example ex;
    ex.features = SparseVector(spec.d, idx, val);
    double margin = dot(ex.features, w_true);
    if (spec.task == TaskKind::classification) {
      ex.label = margin >= 0.0 ? 1.0 : -1.0;
      if (rng.uniform01() < 0.05) ex.label = -ex.label;  // fixed flip rate
    } else {
      ex.label = margin + 0.01 * rng.normal();
    }
    rows.push_back(std::move(ex));
  }
  std::ostringstream name;
  name << "synthetic-n" << spec.n << "-d" << spec.d << "-s" << spec.seed;
  return Dataset(name.str(), spec.d, std::move(rows));
}

}  // namespace sarahbb
