#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace juliadim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : Error { using Error::Error; };
struct DegreeMismatch : Error { using Error::Error; };
struct DegreeCapExceeded : Error { using Error::Error; };
struct NotIrreducible : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct InvalidMap : Error { using Error::Error; };
struct EmptyFamily : Error { using Error::Error; };
struct EmptyWord : Error { using Error::Error; };
struct NoSeed : Error { using Error::Error; };
struct RootFailure : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct EmptyOrbitSet : Error { using Error::Error; };
struct BracketFailure : Error { using Error::Error; };
struct DerivativeSingular : Error { using Error::Error; };
struct BrokenLinks : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

/// Thrown by word enumeration when the admissible word count exceeds the
/// configured cap. Carries the exact (saturating) count.
struct CountCapExceeded : Error {
    CountCapExceeded(const std::string& what, std::uint64_t n)
        : Error(what), count(n) {}
    std::uint64_t count;
};

} // namespace juliadim
