#include "petfeed/harness/series_csv.hpp"

#include "petfeed/firmware/codec.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace petfeed::harness
{
    using firmware::format_decimal;
    using firmware::parse_decimal;

    namespace
    {
        std::string quote(const std::string &cell)
        {
            if (cell.find_first_of(",\"\n\r") == std::string::npos)
            {
                return cell;
            }
            std::string out = "\"";
            for (char c : cell)
            {
                if (c == '"')
                {
                    out += '"';
                }
                out += c;
            }
            out += '"';
            return out;
        }

        /// Splits one record; quoted cells may contain commas, doubled quotes
        /// and newlines. `pos` is advanced past the record terminator.
        std::vector<std::pair<std::string, bool>> read_record(const std::string &text, std::size_t &pos)
        {
            std::vector<std::pair<std::string, bool>> cells;  // (value, was quoted)
            std::string cell;
            bool quoted = false;
            bool in_quotes = false;
            while (pos < text.size())
            {
                const char c = text[pos++];
                if (in_quotes)
                {
                    if (c == '"')
                    {
                        if (pos < text.size() && text[pos] == '"')
                        {
                            cell += '"';
                            ++pos;
                        }
                        else
                        {
                            in_quotes = false;
                        }
                    }
                    else
                    {
                        cell += c;
                    }
                    continue;
                }
                if (c == '"' && cell.empty())
                {
                    in_quotes = quoted = true;
                }
                else if (c == ',')
                {
                    cells.emplace_back(std::move(cell), quoted);
                    cell.clear();
                    quoted = false;
                }
                else if (c == '\n')
                {
                    break;
                }
                else if (c != '\r')
                {
                    cell += c;
                }
            }
            if (in_quotes)
            {
                throw std::runtime_error("unterminated quoted cell");
            }
            cells.emplace_back(std::move(cell), quoted);
            return cells;
        }
    }

    std::string format_series(const std::vector<SeriesRow> &rows)
    {
        std::string out = kSeriesHeader;
        out += '\n';
        for (const auto &r : rows)
        {
            out += format_decimal(r.time);
            out += ',';
            out += format_decimal(r.fill);
            out += ',';
            if (r.distance)
            {
                out += format_decimal(*r.distance);
            }
            out += ',';
            out += quote(r.phase);
            out += ',';
            // An empty but present field is written as "" to stay distinct from unset.
            out += r.field1 ? (r.field1->empty() ? "\"\"" : quote(*r.field1)) : "";
            out += ',';
            out += r.field2 ? (r.field2->empty() ? "\"\"" : quote(*r.field2)) : "";
            out += ',';
            out += std::to_string(r.selection);
            out += '\n';
        }
        return out;
    }

    std::vector<SeriesRow> parse_series(const std::string &csv)
    {
        std::size_t pos = 0;
        std::size_t line = 1;
        const auto header = read_record(csv, pos);
        std::string joined;
        for (std::size_t i = 0; i < header.size(); ++i)
        {
            joined += (i ? "," : "") + header[i].first;
        }
        if (joined != kSeriesHeader)
        {
            throw std::runtime_error("series csv line 1: unexpected header '" + joined + "'");
        }

        std::vector<SeriesRow> rows;
        while (pos < csv.size())
        {
            ++line;
            const auto cells = read_record(csv, pos);
            if (cells.size() == 1 && cells[0].first.empty() && !cells[0].second)
            {
                continue;
            }
            const auto fail = [&](const std::string &msg) -> std::runtime_error {
                return std::runtime_error("series csv line " + std::to_string(line) + ": " + msg);
            };
            if (cells.size() != 7)
            {
                throw fail("expected 7 cells, got " + std::to_string(cells.size()));
            }
            const auto number = [&](const std::string &cell, const char *name) {
                const auto v = parse_decimal(cell);
                if (!v)
                {
                    throw fail(std::string("bad ") + name + " '" + cell + "'");
                }
                return *v;
            };
            const auto text = [](const std::pair<std::string, bool> &cell) -> std::optional<std::string> {
                if (cell.first.empty() && !cell.second)
                {
                    return std::nullopt;
                }
                return cell.first;
            };

            SeriesRow r;
            r.time = number(cells[0].first, "time");
            r.fill = number(cells[1].first, "fill");
            if (!cells[2].first.empty())
            {
                r.distance = number(cells[2].first, "distance");
            }
            r.phase = cells[3].first;
            r.field1 = text(cells[4]);
            r.field2 = text(cells[5]);
            const auto &sel = cells[6].first;
            const auto [ptr, ec] = std::from_chars(sel.data(), sel.data() + sel.size(), r.selection);
            if (ec != std::errc{} || ptr != sel.data() + sel.size())
            {
                throw fail("bad selection '" + sel + "'");
            }
            rows.push_back(std::move(r));
        }
        return rows;
    }

    void export_series(const RunReport &report, const std::filesystem::path &path)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw std::runtime_error("cannot write " + path.string());
        }
        const std::string csv = format_series(report.series);
        out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
        out.close();
        if (!out)
        {
            throw std::runtime_error("write failed for " + path.string());
        }
    }
}
