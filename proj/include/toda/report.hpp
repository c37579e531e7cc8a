#pragma once

#include <string>
#include <vector>

#include "toda/growth.hpp"
#include "toda/leaves.hpp"
#include "toda/scan.hpp"

namespace toda::report {

// 17 significant digits, '.' radix, independent of the global locale.
std::string num(double v);
std::string num(int v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(std::vector<std::string> row);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

CsvTable series_table(const std::vector<PowerSeries>& powers, int first, int step);
CsvTable char_table(const std::vector<CharPoint>& chars);
CsvTable scan_table(const std::vector<ScanPoint>& scan);
CsvTable spike_table(const std::vector<ScanPoint>& scan);
CsvTable trajectory_table(const Thresholds& th, const Leaf& leaf);
CsvTable phase_table(const std::vector<PhaseRow>& rows);
CsvTable contour_table(const std::vector<ContourPoint>& contour);

// Writes to a sibling temp file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

// Hex SHA-1 of "blob <size>\0" + content.
std::string git_blob_hash(const std::string& content);

}  // namespace toda::report
