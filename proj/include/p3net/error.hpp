#pragma once

#include <stdexcept>
#include <string>

namespace p3net {

/// Raised on every contract violation (bad input, invalid state, I/O failure).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace p3net
