#pragma once

#include "psido/error.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

namespace psido::io {

/// Exclusive claim on an output directory; a second writer fails instead of
/// interleaving files.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir)
        : path_(dir / ".psido-lab.lock")
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) {
            throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
        }
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            const std::string why = errno == EEXIST ? "another run holds " + path_.string() : std::strerror(errno);
            throw Error(ErrorKind::Io, "cannot lock output directory: " + why);
        }
        const std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
    }

    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

    ~DirectoryLock()
    {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : out_(path)
    {
        if (!out_) {
            throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
        }
        out_ << std::setprecision(17);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out_ << (i ? "," : "") << columns[i];
        }
        out_ << '\n';
    }

    template <class... T>
    void row(const T&... values)
    {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << values), ...);
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

} // namespace psido::io
