#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hoc {

/// Out-of-contract input: bad coordinates, inverted ranges, points outside
/// the configured domain, invalid configuration values.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// Insert of an object whose id is already indexed.
class duplicate_id_error : public domain_error {
public:
    explicit duplicate_id_error(std::uint64_t id)
        : domain_error("duplicate object id " + std::to_string(id)), id_(id) {}

    std::uint64_t id() const noexcept { return id_; }

private:
    std::uint64_t id_;
};

/// Generic file-system failure outside the index file format.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// CSV parse failure; carries the file name and 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(std::string file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

enum class persist_errc {
    io,
    bad_magic,
    bad_version,
    bad_checksum,
    truncated,
    corrupt,
};

constexpr const char* to_string(persist_errc c) noexcept {
    switch (c) {
        case persist_errc::io: return "io error";
        case persist_errc::bad_magic: return "bad magic";
        case persist_errc::bad_version: return "unsupported version";
        case persist_errc::bad_checksum: return "checksum mismatch";
        case persist_errc::truncated: return "truncated file";
        case persist_errc::corrupt: return "corrupt payload";
    }
    return "unknown";
}

/// Index file save/load failure with a machine-checkable reason code.
class persist_error : public std::runtime_error {
public:
    persist_error(persist_errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    persist_errc code() const noexcept { return code_; }

private:
    persist_errc code_;
};

/// Result-set disagreement between methods that are required to agree.
class verification_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hoc
