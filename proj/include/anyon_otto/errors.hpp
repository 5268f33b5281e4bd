#pragma once

#include <stdexcept>
#include <string>

namespace anyon_otto {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A series or enumeration hit its term/window cap before the requested tolerance.
class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two-anyon quantum numbers must satisfy n1 <= n2.
class OrderingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Path steps or level lists whose label sets do not line up.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The heat absorbed on the hot isochore vanishes, so the efficiency is 0/0.
class DegenerateCycle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace anyon_otto
