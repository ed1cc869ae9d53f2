#pragma once

#include <stdexcept>
#include <string>

namespace planrec {

/// Raised for contract violations on networks, evidence and parameters.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace planrec
