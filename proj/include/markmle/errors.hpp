#pragma once

#include <stdexcept>
#include <string>

namespace markmle {

class NumericError : public std::runtime_error {
public:
    enum class Kind { QuadratureFailure, WindowViolation, DivisionByZeroMeasure, InternalConsistency, EmptyGrid };

    NumericError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace markmle
