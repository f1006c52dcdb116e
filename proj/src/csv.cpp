#include <tokengraph/csv.hpp>

#include <tokengraph/bytes.hpp>

namespace tokengraph
{

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                }
                else {
                    quoted = false;
                }
            }
            else {
                current += c;
            }
        }
        else if (c == '"') {
            quoted = true;
        }
        else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        }
        else {
            current += c;
        }
    }
    if (quoted) {
        throw ParseError("unterminated quoted CSV field");
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace tokengraph
