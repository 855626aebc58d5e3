#ifndef REQREC_SRC_CSV_HPP_
#define REQREC_SRC_CSV_HPP_

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace reqrec::csv {

struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Minimal RFC 4180 reader. Quoted fields may contain commas and doubled
// quotes but not line breaks. Blank lines are skipped. Throws
// Error(kParseError) with the line number.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::optional<Record> next();

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

/// Maps header names to column positions.
class Header {
 public:
  Header() = default;
  explicit Header(const Record& record);

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws kParseError if the column is missing.
  std::size_t require(std::string_view name) const;
  std::size_t width() const noexcept { return width_; }

 private:
  std::map<std::string, std::size_t, std::less<>> columns_;
  std::size_t width_ = 0;
  std::size_t line_ = 0;
};

void write_field(std::ostream& out, std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace reqrec::csv

#endif  // REQREC_SRC_CSV_HPP_
