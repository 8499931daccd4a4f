#include "petfeed/firmware/pins.hpp"

#include <array>
#include <stdexcept>

namespace petfeed::firmware
{
    std::string_view to_string(Pin pin) noexcept
    {
        static constexpr std::array<std::string_view, 9> names{"D0", "D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8"};
        return names[static_cast<std::size_t>(pin)];
    }

    void PinMap::validate() const
    {
        const std::array<Pin, 5> pins{echo, trig, servo1, servo2, ir_out};
        for (std::size_t i = 0; i < pins.size(); ++i)
        {
            for (std::size_t j = i + 1; j < pins.size(); ++j)
            {
                if (pins[i] == pins[j])
                {
                    throw std::invalid_argument("pin " + std::string(to_string(pins[i])) + " is assigned twice");
                }
            }
        }
    }

    Pin PinMap::servo(int feed) const
    {
        switch (feed)
        {
        case 1: return servo1;
        case 2: return servo2;
        default: throw std::invalid_argument("feed index must be 1 or 2");
        }
    }
}
