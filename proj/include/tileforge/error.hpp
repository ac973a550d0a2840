#pragma once

#include <stdexcept>
#include <string>

namespace tileforge {

/// Base class of every failure this library raises.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input (metadata, rasters, manifests, CLI files).
class InputError : public Error {
public:
    using Error::Error;
};

class InvalidMeta : public InputError {
public:
    InvalidMeta(const std::string& id, const std::string& reason)
        : InputError("invalid tile meta '" + id + "': " + reason), id(id), reason(reason) {}
    std::string id;
    std::string reason;
};

class DuplicateId : public InputError {
public:
    explicit DuplicateId(const std::string& id)
        : InputError("duplicate tile id '" + id + "'"), id(id) {}
    std::string id;
};

class UnknownId : public InputError {
public:
    explicit UnknownId(const std::string& id)
        : InputError("tile id '" + id + "' not in catalog"), id(id) {}
    std::string id;
};

class MissingRaster : public InputError {
public:
    explicit MissingRaster(const std::string& id)
        : InputError("raster file missing for tile '" + id + "'"), id(id) {}
    std::string id;
};

class DimensionMismatch : public InputError {
public:
    explicit DimensionMismatch(const std::string& id)
        : InputError("raster dimensions disagree with meta for tile '" + id + "'"), id(id) {}
    std::string id;
};

/// Catch-all for unreadable or ill-formed files and CLI arguments (exit code 4).
class InputFormat : public InputError {
public:
    using InputError::InputError;
};

class InvalidPolygon : public Error {
public:
    using Error::Error;
};

class MaskOutOfBounds : public Error {
public:
    using Error::Error;
};

class DegenerateRing : public Error {
public:
    using Error::Error;
};

class IncompatibleMatch : public Error {
public:
    using Error::Error;
};

class NoCorrespondences : public Error {
public:
    using Error::Error;
};

class ShiftTooLarge : public Error {
public:
    using Error::Error;
};

class EmptySelection : public Error {
public:
    using Error::Error;
};

class SpecInvalid : public Error {
public:
    using Error::Error;
};

class MapperFailure : public Error {
public:
    MapperFailure(const std::string& record, const std::string& cause)
        : Error("mapper failed on record " + record + ": " + cause), record(record), cause(cause) {}
    std::string record;
    std::string cause;
};

class ReducerFailure : public Error {
public:
    ReducerFailure(const std::string& key, const std::string& cause)
        : Error("reducer failed on key '" + key + "': " + cause), key(key), cause(cause) {}
    std::string key;
    std::string cause;
};

} // namespace tileforge
