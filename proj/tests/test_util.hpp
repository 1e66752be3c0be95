#pragma once

#include "nakamap/error.hpp"

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <unistd.h>
#include <vector>

namespace nakamap::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("nakamap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

} // namespace nakamap::test

/// Checks that `expr` throws nakamap::Error with the given code.
#define CHECK_ERROR_CODE(expr, expected)                                                                               \
    do {                                                                                                               \
        bool thrown_ = false;                                                                                          \
        try {                                                                                                          \
            (void)(expr);                                                                                              \
        } catch (const ::nakamap::Error& e_) {                                                                         \
            thrown_ = true;                                                                                            \
            CHECK_MESSAGE(e_.code() == (expected), "got " << ::nakamap::to_string(e_.code()));                         \
        }                                                                                                              \
        CHECK_MESSAGE(thrown_, "expected " << ::nakamap::to_string(expected));                                         \
    } while (false)
