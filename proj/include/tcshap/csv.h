#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tcshap::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

// Splits RFC-4180 text into records. Handles quoted fields, doubled quotes,
// embedded newlines, CRLF and a UTF-8 BOM. A trailing newline does not start
// an empty record. Throws DataError on an unterminated quote.
std::vector<Record> Parse(std::string_view text);

// Writes one field, quoting only when needed.
void WriteField(std::ostream& out, std::string_view field);
void WriteRow(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace tcshap::csv
