#pragma once

#include <filesystem>
#include <string>

#ifndef CHEMTEXT_DATA_DIR
#define CHEMTEXT_DATA_DIR "data"
#endif

namespace testsupport {

inline std::filesystem::path data_dir() { return std::filesystem::path(CHEMTEXT_DATA_DIR); }

inline std::filesystem::path fixture(const std::string& rel) { return data_dir() / "fixtures" / rel; }

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("chemtext_" + tag + "_" + std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directories(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("TempDir: could not create scratch directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

  private:
    std::filesystem::path path_;
};

}  // namespace testsupport
