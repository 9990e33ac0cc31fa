#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chemlayer {

/// Invalid model parameter, grid request or initial data.
class ParamError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Query outside the domain of a field or series.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A time stepper left its admissible regime (positivity loss, blow-up, Newton failure).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure of one pipeline stage; carries the stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace chemlayer
