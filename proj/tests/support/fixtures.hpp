#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "statealign/discretize.hpp"
#include "statealign/model.hpp"

namespace statealign::testing {

StateSequence seq(std::vector<int> states, std::string id = {},
                  StateAlphabet alphabet = StateAlphabet::three_state());

/// Uniform random ranks in [0, k).
std::vector<int> random_ranks(std::mt19937_64& rng, std::size_t n, int k = 3);

/// Draws y from a local-level model with the given q and r; x starts at level.
std::vector<double> simulate_local_level(std::mt19937_64& rng, std::size_t n, double q, double r,
                                         double level = 0.0);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace statealign::testing
