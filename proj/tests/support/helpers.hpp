#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "animacy/wordnet.hpp"

namespace animacy::testing {

inline std::filesystem::path data_dir() { return ANIMACY_TEST_DATA; }

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("animacy-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline const wordnet::WordNetGraph& mini_graph() {
  static const auto g = wordnet::WordNetGraph::load(data_dir() / "mini_wordnet");
  return g;
}

// Full WordNet 3.0 when configured, else nullptr.
inline const wordnet::WordNetGraph* full_graph() {
  static const std::unique_ptr<wordnet::WordNetGraph> g = [] {
    std::filesystem::path dir = ANIMACY_WORDNET_DIR;
    if (dir.empty() || !std::filesystem::exists(dir / "data.noun"))
      return std::unique_ptr<wordnet::WordNetGraph>{};
    return std::make_unique<wordnet::WordNetGraph>(wordnet::WordNetGraph::load(dir));
  }();
  return g.get();
}

}  // namespace animacy::testing
