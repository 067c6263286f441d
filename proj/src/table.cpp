#include "qvlens/table.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qvlens/constants.hpp"
#include "qvlens/version.hpp"

namespace qvlens {

namespace {

std::string column_header(const Table::Column& col, bool arcsec) {
    if (!arcsec || !col.angle) return col.name;
    const auto pos = col.name.rfind("_rad");
    if (pos == std::string::npos || pos + 4 != col.name.size()) return col.name;
    return col.name.substr(0, pos) + "_arcsec";
}

double cell_value(const Table& table, std::size_t row, std::size_t col, bool arcsec) {
    const double raw = table.rows[row][col];
    return (arcsec && table.columns[col].angle) ? raw * kArcsecPerRad : raw;
}

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", value);
    return buf;
}

}  // namespace

void Table::add_column(std::string name, Kind kind, bool angle) {
    columns.push_back({std::move(name), kind, angle});
}

void Table::add_row(std::initializer_list<double> values) {
    if (values.size() != columns.size())
        throw std::logic_error("row width does not match column count");
    rows.emplace_back(values);
}

std::string to_csv(const Table& table, bool arcsec) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ",";
        out << column_header(table.columns[c], arcsec);
    }
    out << "\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out << ",";
            if (table.columns[c].kind == Table::Kind::integer) {
                out << static_cast<long long>(table.rows[r][c]);
            } else {
                out << format_real(cell_value(table, r, c, arcsec));
            }
        }
        out << "\n";
    }
    return out.str();
}

std::string to_json(const Table& table, const std::string& config_hash, bool arcsec) {
    nlohmann::ordered_json doc;
    doc["metadata"] = {{"version", kVersion},
                       {"config_hash", config_hash},
                       {"angle_unit", arcsec ? "arcsec" : "rad"}};
    nlohmann::ordered_json columns = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        nlohmann::ordered_json values = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            if (table.columns[c].kind == Table::Kind::integer) {
                values.push_back(static_cast<long long>(table.rows[r][c]));
            } else {
                values.push_back(cell_value(table, r, c, arcsec));
            }
        }
        columns[column_header(table.columns[c], arcsec)] = std::move(values);
    }
    doc["columns"] = std::move(columns);
    return doc.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char ch : text) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace qvlens
