#include "narmine/csv.hpp"

#include <algorithm>

namespace narmine::csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quote in CSV line: " + line);
    out.push_back(std::move(field));
    return out;
}

std::string quote(const std::string& field) {
    bool needs = field.find_first_of(",\"\n") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += quote(fields[i]);
    }
    return out;
}

int Table::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return -1;
    return static_cast<int>(it - header.begin());
}

int Table::require_column(const std::string& name) const {
    int idx = column(name);
    if (idx < 0) throw ParseError("missing CSV column: " + name);
    return idx;
}

Table read(std::istream& in, bool has_header) {
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (first && has_header) {
            table.header = std::move(fields);
        } else {
            table.rows.push_back(std::move(fields));
        }
        first = false;
    }
    return table;
}

Table read_file(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return read(in, has_header);
}

void write(std::ostream& out, const Table& table) {
    if (!table.header.empty()) out << join(table.header) << '\n';
    for (const auto& row : table.rows) out << join(row) << '\n';
}

}  // namespace narmine::csv
