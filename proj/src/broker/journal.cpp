#include "petfeed/broker/journal.hpp"

#include "petfeed/broker/types.hpp"

#include <sstream>
#include <string>

namespace petfeed::broker
{
    Journal::Journal(std::filesystem::path path) : path_(std::move(path))
    {
        if (path_.has_parent_path())
        {
            std::filesystem::create_directories(path_.parent_path());
        }
        out_.open(path_, std::ios::out | std::ios::app | std::ios::binary);
        if (!out_)
        {
            throw BrokerError(ErrorCode::Storage, "cannot open journal " + path_.string());
        }
    }

    void Journal::append(const nlohmann::json &record)
    {
        const std::string line = record.dump() + '\n';
        std::lock_guard lock(mutex_);
        out_.write(line.data(), static_cast<std::streamsize>(line.size()));
        out_.flush();
        if (!out_)
        {
            throw BrokerError(ErrorCode::Storage, "journal write failed: " + path_.string());
        }
    }

    std::vector<nlohmann::json> Journal::read_all(const std::filesystem::path &path, bool repair)
    {
        std::vector<nlohmann::json> records;
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            return records;
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string content = buffer.str();
        in.close();

        std::size_t pos = 0;
        std::size_t line_no = 0;
        while (pos < content.size())
        {
            const std::size_t nl = content.find('\n', pos);
            if (nl == std::string::npos)
            {
                if (repair)
                {
                    std::filesystem::resize_file(path, pos);
                }
                break;
            }
            ++line_no;
            const std::string_view line(content.data() + pos, nl - pos);
            pos = nl + 1;
            if (line.empty())
            {
                continue;
            }
            try
            {
                records.push_back(nlohmann::json::parse(line));
            }
            catch (const nlohmann::json::parse_error &e)
            {
                throw BrokerError(ErrorCode::Storage,
                                  path.string() + ":" + std::to_string(line_no) + ": corrupt journal record: " + e.what());
            }
        }
        return records;
    }
}
