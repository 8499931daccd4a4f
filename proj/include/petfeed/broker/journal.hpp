#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <mutex>
#include <vector>

namespace petfeed::broker
{
    /// Append-only newline-delimited JSON log. Every record is flushed before
    /// append() returns.
    class Journal
    {
    public:
        explicit Journal(std::filesystem::path path);

        void append(const nlohmann::json &record);

        const std::filesystem::path &path() const noexcept { return path_; }

        /// Reads every complete record. A final line without its terminating
        /// newline is a torn write from a crash and is dropped (and truncated
        /// away when repair is set); a malformed complete line throws.
        static std::vector<nlohmann::json> read_all(const std::filesystem::path &path, bool repair = false);

    private:
        std::filesystem::path path_;
        std::ofstream out_;
        std::mutex mutex_;
    };
}
