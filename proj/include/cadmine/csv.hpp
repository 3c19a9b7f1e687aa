#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cadmine {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC-4180: comma delimiter, optional double-quote quoting with "" escapes,
// tolerant of CRLF and a trailing newline. First record is the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

std::string csv_escape(std::string_view field);
void write_csv(const std::string& path, const CsvTable& table);

} // namespace cadmine
