// Error types shared across the library. Each maps to one failure mode so
// callers (and the CLI exit-code policy) can distinguish bad arguments from
// I/O trouble from numeric divergence.
#pragma once

#include <stdexcept>
#include <string>

namespace fractalssm {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad caller input: shapes, names, flag values. CLI exit code 2.
struct InvalidArgument : Error {
    using Error::Error;
};

struct InvalidShape : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};
struct UnknownKind : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};
struct ShapeMismatch : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};
struct OutOfRange : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};
struct EmptyThresholds : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

// Domain failures: legal-looking input the algorithm cannot serve. CLI exit code 3.
struct GridTooSmall : Error {
    using Error::Error;
};
struct TooShort : Error {
    using Error::Error;
};
struct TooLarge : Error {
    using Error::Error;
};
struct NonConstantParams : Error {
    using Error::Error;
};
struct NotDiscretized : Error {
    using Error::Error;
};
struct DivergedLoss : Error {
    using Error::Error;
};
struct BadCheckpoint : Error {
    using Error::Error;
};

// Filesystem trouble. CLI exit code 3.
struct IoFailure : Error {
    using Error::Error;
};

}  // namespace fractalssm
