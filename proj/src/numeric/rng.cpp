#include "costreg/numeric/rng.hpp"

namespace costreg {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// FNV-1a; labels are short literals so collisions are not a concern.
std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::string_view label) const {
  return Rng(splitmix64(seed_ ^ splitmix64(hash_label(label))));
}

double Rng::uniform(double low, double high) {
  std::uniform_real_distribution<double> dist(low, high);
  return dist(engine_);
}

double Rng::normal() { return normal_(engine_); }

std::uint64_t Rng::below(std::uint64_t bound) {
  std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
  return dist(engine_);
}

Vector Rng::uniform_vector(Eigen::Index n, double low, double high) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(low, high);
  return v;
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
  return m;
}

}  // namespace costreg
