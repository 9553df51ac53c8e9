#pragma once

#include <stdexcept>
#include <string>

namespace oasis {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spec/scenario/grid file syntax problems. Carries the 1-based line number
// and the offending field name when known.
struct ParseError : Error {
    ParseError(std::size_t line_, std::string field_, const std::string& what_)
        : Error("line " + std::to_string(line_) + (field_.empty() ? "" : " (" + field_ + ")") +
                ": " + what_),
          line(line_),
          field(std::move(field_)) {}
    std::size_t line = 0;
    std::string field;
};

struct ValidationError : Error {
    using Error::Error;
};

// Shape inference produced or received an impossible tensor dimension.
struct ShapeError : Error {
    using Error::Error;
};

struct DegenerateRange : Error {
    using Error::Error;
};
struct SymbolOutOfRange : Error {
    using Error::Error;
};
struct EmptyBatch : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};
struct ShapeMismatch : Error {
    using Error::Error;
};
struct NonFiniteInput : Error {
    using Error::Error;
};
struct EmptyHistogram : Error {
    using Error::Error;
};
struct UnknownSymbol : Error {
    using Error::Error;
};
struct CorruptStream : Error {
    using Error::Error;
};
struct SupportMismatch : Error {
    using Error::Error;
};
struct BadMagic : Error {
    using Error::Error;
};
struct TruncatedPayload : Error {
    using Error::Error;
};
struct DimOverflow : Error {
    using Error::Error;
};
struct TopologyError : Error {
    using Error::Error;
};
struct InvalidBits : Error {
    using Error::Error;
};

}  // namespace oasis
