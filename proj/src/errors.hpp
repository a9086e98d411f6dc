#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gsnx {

// Stable codes; the C API mirrors these values in gsnx_status.
enum class ErrorCode : int {
    InvalidArgument = 1,
    Scan = 2,
    PrefsParse = 3,
    DbOpen = 4,
    CacheParse = 5,
    MalformedTimestamp = 6,
    Ingest = 7,
    Forge = 8,
    Usage = 9,
    NotApplicable = 10,
    Io = 11,
    OnlineCheckFailed = 12,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ScanError : public Error {
public:
    explicit ScanError(const std::string& what) : Error(ErrorCode::Scan, what) {}
};

class PrefsParseError : public Error {
public:
    PrefsParseError(const std::string& what, std::uint64_t offset)
        : Error(ErrorCode::PrefsParse, what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class DbOpenError : public Error {
public:
    DbOpenError(const std::string& path, const std::string& why)
        : Error(ErrorCode::DbOpen, path + ": " + why), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class CacheParseError : public Error {
public:
    explicit CacheParseError(const std::string& what) : Error(ErrorCode::CacheParse, what) {}
};

class MalformedTimestamp : public Error {
public:
    explicit MalformedTimestamp(const std::string& what) : Error(ErrorCode::MalformedTimestamp, what) {}
};

class IngestError : public Error {
public:
    explicit IngestError(const std::string& what) : Error(ErrorCode::Ingest, what) {}
};

class ForgeError : public Error {
public:
    explicit ForgeError(const std::string& what) : Error(ErrorCode::Forge, what) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorCode::Usage, what) {}
};

class NotApplicable : public Error {
public:
    explicit NotApplicable(const std::string& what) : Error(ErrorCode::NotApplicable, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace gsnx
