#pragma once

#include <stdexcept>
#include <string>

namespace rigmixer {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// skeleton
struct DegenerateBone : Error { using Error::Error; };
struct EmptyWeights   : Error { using Error::Error; };
struct EmptyPart      : Error { using Error::Error; };

// unify / sdf mapping
struct DegenerateBox  : Error { using Error::Error; };
struct IncompletePairs: Error { using Error::Error; };
struct BrokenParent   : Error { using Error::Error; };

// sdf
struct UnclosablePart : Error { using Error::Error; };
struct MissingGrid    : Error { using Error::Error; };
struct EmptyList      : Error { using Error::Error; };
struct NoSurface      : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };

// io
struct ParseError     : Error { using Error::Error; };
struct ValidationError: Error { using Error::Error; };

} // namespace rigmixer
