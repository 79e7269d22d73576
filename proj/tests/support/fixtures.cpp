#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace statealign::testing {

StateSequence seq(std::vector<int> states, std::string id, StateAlphabet alphabet) {
  StateSequence s;
  s.series_id = std::move(id);
  s.states = std::move(states);
  s.alphabet = std::move(alphabet);
  return s;
}

std::vector<int> random_ranks(std::mt19937_64& rng, std::size_t n, int k) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> out(n);
  for (int& v : out) v = pick(rng);
  return out;
}

std::vector<double> simulate_local_level(std::mt19937_64& rng, std::size_t n, double q, double r,
                                         double level) {
  std::normal_distribution<double> w(0.0, std::sqrt(q));
  std::normal_distribution<double> v(0.0, std::sqrt(r));
  std::vector<double> y(n);
  double x = level;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) x += w(rng);
    y[t] = x + v(rng);
  }
  return y;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("statealign-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace statealign::testing
