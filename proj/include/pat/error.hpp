#pragma once

#include <stdexcept>
#include <string>

namespace pat {

// Base for every failure raised by the toolkit. Callers that only need to
// distinguish "our" errors from std ones can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PAT_DEFINE_ERROR(Name)                 \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

PAT_DEFINE_ERROR(InvalidArgument);
PAT_DEFINE_ERROR(DuplicateSensor);
PAT_DEFINE_ERROR(OutOfGrid);
PAT_DEFINE_ERROR(WrapContamination);
PAT_DEFINE_ERROR(DimensionMismatch);
PAT_DEFINE_ERROR(DegenerateRange);
PAT_DEFINE_ERROR(DegenerateCrop);
PAT_DEFINE_ERROR(CorruptManifest);
PAT_DEFINE_ERROR(ShapeMismatch);
PAT_DEFINE_ERROR(UnsupportedVersion);

#undef PAT_DEFINE_ERROR

} // namespace pat
