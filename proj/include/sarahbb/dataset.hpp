#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarahbb/linalg.hpp"

namespace sarahbb {

enum class TaskKind { classification, regression };

struct Example {
  SparseVector features;
  double label = 0.0;
};

/// Immutable labeled collection; every feature row has the dataset dimension.
class Dataset {
 public:
  Dataset(std::string name, std::size_t dim, std::vector<Example> examples);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t n() const { return examples_.size(); }
  const Example& example(std::size_t i) const { return examples_[i]; }
  const std::vector<Example>& examples() const { return examples_; }

  // Stable FNV-1a over labels, indices and value bits; keys the reference
  // cache, so it must not depend on process or pointer state.
  std::uint64_t content_hash() const;

 private:
  std::string name_;
  std::size_t dim_;
  std::vector<Example> examples_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ParseOptions {
  TaskKind task = TaskKind::classification;
  // 0 = dimension is the largest index seen; files omit trailing zero
  // columns, so published dims need the override.
  std::size_t dim_override = 0;
};

// `label idx:val idx:val ...` per line, 1-based strictly increasing indices.
// Classification labels are coerced: > 0 becomes +1, else -1.
Dataset parse_libsvm(std::istream& in, const std::string& name,
                     const ParseOptions& opts = {});
Dataset parse_libsvm_file(const std::filesystem::path& path,
                          const ParseOptions& opts = {});

void write_libsvm(const Dataset& ds, std::ostream& out);

struct NormalizeResult {
  Dataset dataset;
  std::vector<std::size_t> zero_rows;  // left unchanged, reported
};

// Scales each feature row to unit Euclidean norm.
NormalizeResult normalize_rows(const Dataset& ds);

struct SyntheticSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  double condition_hint = 1.0;  // per-coordinate scale spread
  TaskKind task = TaskKind::classification;
};

// Pure function of the spec: replays bit-identically. Classification labels
// are sign(x^T w_true) with a fixed 5% flip rate; regression adds small noise.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace sarahbb
