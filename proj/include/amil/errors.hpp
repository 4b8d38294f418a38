#pragma once

#include <stdexcept>
#include <string>

namespace amil {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameterError : public Error { public: using Error::Error; };
class InvalidValueError     : public Error { public: using Error::Error; };
class InsufficientDataError : public Error { public: using Error::Error; };
class InvalidSpecError      : public Error { public: using Error::Error; };
class InvalidGridError      : public Error { public: using Error::Error; };
class InvalidBagError       : public Error { public: using Error::Error; };
class InvalidLabelError     : public Error { public: using Error::Error; };
class ShapeError            : public Error { public: using Error::Error; };
class HeadMismatchError     : public Error { public: using Error::Error; };

class InsufficientPointsError   : public Error { public: using Error::Error; };
class NonConvexFitError         : public Error { public: using Error::Error; };
class InfiniteInformationError  : public Error { public: using Error::Error; };
class DegenerateDesignError     : public Error { public: using Error::Error; };

class FormatError    : public Error { public: using Error::Error; };
class IntegrityError : public Error { public: using Error::Error; };
class ConfigError    : public Error { public: using Error::Error; };

} // namespace amil
