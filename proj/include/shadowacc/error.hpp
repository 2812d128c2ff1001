#pragma once

#include <stdexcept>
#include <string>

namespace shadowacc {

/// Base class for every error raised by the library. `kind()` is the stable
/// identifier used in CLI diagnostics and HTTP error bodies.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SHADOWACC_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

SHADOWACC_DEFINE_ERROR(DimensionError);
SHADOWACC_DEFINE_ERROR(PolarWindowError);
SHADOWACC_DEFINE_ERROR(SourceUnavailable);
SHADOWACC_DEFINE_ERROR(ParseError);
SHADOWACC_DEFINE_ERROR(MissingCenterTile);
SHADOWACC_DEFINE_ERROR(EmptyMask);
SHADOWACC_DEFINE_ERROR(InsufficientTiles);
SHADOWACC_DEFINE_ERROR(KTooLarge);
SHADOWACC_DEFINE_ERROR(NoCoverage);
SHADOWACC_DEFINE_ERROR(EmptyIntersection);
SHADOWACC_DEFINE_ERROR(OutOfRange);
SHADOWACC_DEFINE_ERROR(MismatchedGeometry);
SHADOWACC_DEFINE_ERROR(ScenarioTooLarge);
SHADOWACC_DEFINE_ERROR(InvalidFootprint);
SHADOWACC_DEFINE_ERROR(InvalidArgument);
SHADOWACC_DEFINE_ERROR(IoError);

#undef SHADOWACC_DEFINE_ERROR

}  // namespace shadowacc
