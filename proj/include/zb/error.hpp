#ifndef ZB_ERROR_HPP
#define ZB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace zb {

/// Inputs whose shapes do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inputs that are well-shaped but violate a precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require_dims(bool ok, const std::string& what)
{
    if (!ok) throw DimensionError(what);
}

} // namespace zb

#endif
