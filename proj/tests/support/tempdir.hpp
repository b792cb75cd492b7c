#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace testsupport {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = (base / (tag + "-" + std::to_string(rd()))).string();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

}  // namespace testsupport
