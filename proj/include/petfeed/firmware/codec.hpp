#pragma once

#include "petfeed/broker/types.hpp"

#include <optional>
#include <string>

namespace petfeed::firmware
{
    /// IR channel row: field1 presence (1/0), field2 bowl surface distance in
    /// metres. field2 is absent when the echo timed out.
    struct IrReading
    {
        bool detected = false;
        std::optional<double> distance;

        bool operator==(const IrReading &) const = default;
    };

    broker::FieldValues encode_ir_fields(bool ir_detected, std::optional<double> distance);

    /// Returns nullopt when field1 is missing or not 0/1, or field2 is not a number.
    std::optional<IrReading> decode_ir_fields(const broker::FieldValues &fields);

    /// AppChannel field1: 0 none, 1 feed one, 2 feed two.
    broker::FieldValues encode_selection(int selection);

    /// Unset or unrecognized values read as 0.
    int decode_selection(const broker::FieldValues &fields) noexcept;

    /// Shortest decimal text that parses back to exactly `value`.
    std::string format_decimal(double value);
    std::optional<double> parse_decimal(std::string_view text) noexcept;
}
