#include "nsf/errors.hpp"

#include <sstream>

namespace nsf {

PositivityError::PositivityError(Field field, std::size_t cell, double value)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << (field == Field::Density ? "density" : "temperature") << " lost positivity in cell "
             << cell << " (value " << value << ")";
          return os.str();
      }()),
      field_(field),
      cell_(cell),
      value_(value) {}

}  // namespace nsf
