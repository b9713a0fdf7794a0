#include "hecc/units.hpp"

#include <cmath>
#include <stdexcept>

namespace hecc::units {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear)
{
    if (!(linear > 0.0))
        throw std::invalid_argument("linear_to_db: value must be positive");
    return 10.0 * std::log10(linear);
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt)
{
    if (!(watt > 0.0))
        throw std::invalid_argument("watt_to_dbm: power must be positive");
    return 10.0 * std::log10(watt) + 30.0;
}

}  // namespace hecc::units
