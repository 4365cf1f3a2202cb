#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace weedbot::csv {

/// Quotes a field per RFC 4180 when it contains a comma, quote or line break.
inline std::string escape(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

/// Fixed-precision formatting so numeric output is byte-stable.
inline std::string num(double value, int precision = 6)
{
    if (value == 0.0) {
        value = 0.0;  // folds -0.0
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    std::string out = buf;
    // Values that round to zero print without a sign.
    if (out[0] == '-' && out.find_first_not_of("0.", 1) == std::string::npos) {
        out.erase(0, 1);
    }
    return out;
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) {
            os << ',';
        }
        os << escape(fields[i]);
    }
    os << "\r\n";
}

}  // namespace weedbot::csv
