#pragma once

#include "petfeed/harness/report.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace petfeed::harness
{
    inline constexpr const char *kSeriesHeader = "time,fill,distance,phase,field1,field2,selection";

    /// CSV with kSeriesHeader. Numbers use the shortest exact decimal form,
    /// so parse_series(format_series(rows)) == rows. Empty optionals are
    /// empty cells.
    std::string format_series(const std::vector<SeriesRow> &rows);

    /// Throws std::runtime_error naming the offending line.
    std::vector<SeriesRow> parse_series(const std::string &csv);

    /// Throws std::runtime_error when the file cannot be written.
    void export_series(const RunReport &report, const std::filesystem::path &path);
}
