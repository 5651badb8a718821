#ifndef QCRF_ERRORS_HPP
#define QCRF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcrf {

// Invalid caller input (bad dimensions, out-of-range parameters, refused guards).
// The CLI maps this to exit code 1.
class input_error : public std::runtime_error {
  public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file content. Carries the byte offset where parsing failed.
class format_error : public input_error {
  public:
    format_error(const std::string& what, std::size_t byte_offset)
        : input_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const { return offset_; }

  private:
    std::size_t offset_;
};

// Broken internal invariant; indicates a bug, not bad input.
// The CLI maps this to exit code 2.
class internal_error : public std::logic_error {
  public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw input_error(what);
}

inline void check_invariant(bool cond, const std::string& what) {
    if (!cond) throw internal_error(what);
}

}  // namespace detail

}  // namespace qcrf

#endif
