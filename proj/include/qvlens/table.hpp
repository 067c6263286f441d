#ifndef QVLENS_TABLE_HPP
#define QVLENS_TABLE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace qvlens {

/// Column-oriented numeric table for the CLI outputs. Real columns are
/// emitted in scientific notation with 12 significant digits; integer
/// columns (counts, flags) as plain integers. Columns flagged as angles are
/// converted when serializing in arcseconds, with the _rad suffix renamed.
struct Table {
    enum class Kind { real, integer };

    struct Column {
        std::string name;
        Kind kind = Kind::real;
        bool angle = false;
    };

    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;

    void add_column(std::string name, Kind kind = Kind::real, bool angle = false);
    void add_row(std::initializer_list<double> values);
};

std::string to_csv(const Table& table, bool arcsec = false);

/// JSON document with a metadata object (version, config hash) and one array
/// per column.
std::string to_json(const Table& table, const std::string& config_hash, bool arcsec = false);

/// FNV-1a 64-bit hash, hex-encoded; used to tag outputs with their config.
std::string fnv1a_hex(const std::string& text);

}  // namespace qvlens

#endif
