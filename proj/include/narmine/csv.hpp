#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "narmine/error.hpp"

namespace narmine::csv {

// Splits one CSV line. Supports double-quoted fields with embedded commas
// and doubled quotes; no embedded newlines.
std::vector<std::string> split_line(const std::string& line);

// Quotes a field only when needed.
std::string quote(const std::string& field);

std::string join(const std::vector<std::string>& fields);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
    int require_column(const std::string& name) const;
};

Table read(std::istream& in, bool has_header = true);
Table read_file(const std::string& path, bool has_header = true);

void write(std::ostream& out, const Table& table);

}  // namespace narmine::csv
