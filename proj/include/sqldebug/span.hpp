#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqldebug {

/// Half-open byte range [begin, end) into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  [[nodiscard]] std::size_t size() const { return end - begin; }
  [[nodiscard]] bool contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool operator==(const Span&) const = default;
};

/// Domain-level failure (bad input, catalog violation, malformed record).
/// The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sqldebug
