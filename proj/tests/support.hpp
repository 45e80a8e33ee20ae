// Shared fixtures for the unit tests.
#pragma once

#include "sarbench/core.hpp"
#include "sarbench/rng.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

namespace sarbench::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        std::string name = "sarbench_" + tag;
        if (info) name += std::string("_") + info->test_suite_name() + "_" + info->name();
        path_ = std::filesystem::temp_directory_path() / name;
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Uniform [0,1) pixels.
inline Image random_image(int h, int w, SeededRng& rng) {
    Image img(h, w);
    for (double& p : img.pixels()) p = rng.uniform();
    return img;
}

}  // namespace sarbench::testing
