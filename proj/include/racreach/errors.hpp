#pragma once

#include <stdexcept>

namespace racreach {

/// The model document or the automaton it describes is unusable.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A well-formed model could not be analysed with the given settings.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace racreach
