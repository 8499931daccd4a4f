#include "petfeed/devices/ir_sensor.hpp"

#include <stdexcept>

namespace petfeed::devices
{
    void IRConfig::validate() const
    {
        if (!(range_min > 0.0 && range_min < range_max))
        {
            throw std::invalid_argument("IR range requires 0 < range_min < range_max");
        }
    }

    Level ir_read(const IRConfig &cfg, bool present, double distance)
    {
        if (!(distance >= 0.0))
        {
            throw std::invalid_argument("IR distance must be non-negative");
        }
        const bool detected = present && distance >= cfg.range_min && distance <= cfg.range_max;
        const bool high = cfg.active_low ? !detected : detected;
        return high ? Level::High : Level::Low;
    }
}
