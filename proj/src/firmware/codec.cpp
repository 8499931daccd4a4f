#include "petfeed/firmware/codec.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace petfeed::firmware
{
    std::string format_decimal(double value)
    {
        std::array<char, 32> buf{};
        const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
        if (ec != std::errc{})
        {
            throw std::runtime_error("decimal formatting failed");
        }
        return {buf.data(), ptr};
    }

    std::optional<double> parse_decimal(std::string_view text) noexcept
    {
        double value = 0.0;
        const auto *end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (ec != std::errc{} || ptr != end || !std::isfinite(value))
        {
            return std::nullopt;
        }
        return value;
    }

    broker::FieldValues encode_ir_fields(bool ir_detected, std::optional<double> distance)
    {
        broker::FieldValues f;
        f[0] = ir_detected ? "1" : "0";
        if (distance)
        {
            f[1] = format_decimal(*distance);
        }
        return f;
    }

    std::optional<IrReading> decode_ir_fields(const broker::FieldValues &fields)
    {
        if (!fields[0] || (*fields[0] != "0" && *fields[0] != "1"))
        {
            return std::nullopt;
        }
        IrReading r;
        r.detected = *fields[0] == "1";
        if (fields[1])
        {
            r.distance = parse_decimal(*fields[1]);
            if (!r.distance)
            {
                return std::nullopt;
            }
        }
        return r;
    }

    broker::FieldValues encode_selection(int selection)
    {
        if (selection < 0 || selection > 2)
        {
            throw std::invalid_argument("selection must be 0, 1 or 2");
        }
        broker::FieldValues f;
        f[0] = std::to_string(selection);
        return f;
    }

    int decode_selection(const broker::FieldValues &fields) noexcept
    {
        if (!fields[0])
        {
            return 0;
        }
        const auto &v = *fields[0];
        if (v == "1") return 1;
        if (v == "2") return 2;
        return 0;
    }
}
