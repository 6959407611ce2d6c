#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "rcdamage/geometry.hpp"

namespace rcdamage::testing {

inline std::filesystem::path fixtures() { return RCDAMAGE_FIXTURES; }

// Tiny generator wrapper for the property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  BoundingBox box(double extent = 100.0) {
    const double w = uniform(1.0, extent / 2);
    const double h = uniform(1.0, extent / 2);
    return make_box(uniform(0.0, extent - w), uniform(0.0, extent - h), w, h);
  }
};

// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string &tag) {
    path = std::filesystem::temp_directory_path() /
           (tag + "-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
};

} // namespace rcdamage::testing
