// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace n2s {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- file format / IO ---
struct BadMagic : Error {
    explicit BadMagic(const std::string& msg) : Error(msg) {}
};
struct TruncatedPayload : Error {
    explicit TruncatedPayload(const std::string& msg) : Error(msg) {}
};
struct UnsupportedDtype : Error {
    explicit UnsupportedDtype(const std::string& msg) : Error(msg) {}
};
struct UnsupportedVersion : Error {
    explicit UnsupportedVersion(const std::string& msg) : Error(msg) {}
};
struct IoFailure : Error {
    explicit IoFailure(const std::string& msg) : Error(msg) {}
};

// --- noise synthesis ---
struct NegativeStd : Error {
    explicit NegativeStd(const std::string& msg) : Error(msg) {}
};
struct NegativeSignal : Error {
    explicit NegativeSignal(const std::string& msg) : Error(msg) {}
};

// --- similarity search ---
struct EvenPatchSize : Error {
    explicit EvenPatchSize(const std::string& msg) : Error(msg) {}
};
struct OutOfBounds : Error {
    explicit OutOfBounds(const std::string& msg) : Error(msg) {}
};
struct KTooLarge : Error {
    explicit KTooLarge(const std::string& msg) : Error(msg) {}
};
struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

// --- pairing / losses ---
struct DimMismatch : Error {
    explicit DimMismatch(const std::string& msg) : Error(msg) {}
};
struct AllPixelsExcluded : Error {
    explicit AllPixelsExcluded(const std::string& msg) : Error(msg) {}
};

// --- model / optimizer ---
struct ShapeTooSmall : Error {
    explicit ShapeTooSmall(const std::string& msg) : Error(msg) {}
};
struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};
struct MissingForwardCache : Error {
    explicit MissingForwardCache(const std::string& msg) : Error(msg) {}
};

// --- training ---
struct RoleMissing : Error {
    explicit RoleMissing(const std::string& msg) : Error(msg) {}
};
struct CropTooLarge : Error {
    explicit CropTooLarge(const std::string& msg) : Error(msg) {}
};
struct TooManySkipped : Error {
    explicit TooManySkipped(const std::string& msg) : Error(msg) {}
};

} // namespace n2s
