#include "ellrisk/sobol.hpp"

#include <array>
#include <bit>

#include "ellrisk/error.hpp"

namespace ellrisk {

namespace {

struct DirectionSeed {
  int degree;
  std::uint32_t poly;
  std::array<std::uint32_t, 6> m;
};

// Dimensions 2..16 of the Joe-Kuo new-joe-kuo-6.21201 table.
constexpr std::array<DirectionSeed, 15> kSeeds = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 1, 1, 9, 23, 37}},
    {6, 13, {1, 3, 3, 5, 19, 33}},
    {6, 16, {1, 1, 3, 13, 11, 7}},
}};

constexpr int kBits = 32;

}  // namespace

Sobol::Sobol(int dim, std::vector<std::uint32_t> shift) : dim_(dim), state_(dim, 0u), shift_(std::move(shift)) {
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorCode::DomainError, "Sobol dimension must be in [1,16]");
  if (shift_.empty()) shift_.assign(dim, 0u);
  if (static_cast<int>(shift_.size()) != dim) throw Error(ErrorCode::DimensionMismatch, "Sobol shift length");
  directions_.assign(dim, std::vector<std::uint32_t>(kBits + 1, 0u));
  for (int i = 1; i <= kBits; ++i) directions_[0][i] = 1u << (kBits - i);
  for (int d = 1; d < dim; ++d) {
    const auto& seed = kSeeds[d - 1];
    auto& v = directions_[d];
    const int s = seed.degree;
    for (int i = 1; i <= s; ++i) v[i] = seed.m[i - 1] << (kBits - i);
    for (int i = s + 1; i <= kBits; ++i) {
      v[i] = v[i - s] ^ (v[i - s] >> s);
      for (int k = 1; k < s; ++k)
        if ((seed.poly >> (s - 1 - k)) & 1u) v[i] ^= v[i - k];
    }
  }
}

void Sobol::next(double* out) {
  constexpr double scale = 1.0 / 4294967296.0;
  for (int d = 0; d < dim_; ++d) out[d] = ((state_[d] ^ shift_[d]) + 0.5) * scale;
  // advance along the Gray code: flip the direction of the lowest zero bit
  const int c = std::countr_one(index_) + 1;
  if (c <= kBits)
    for (int d = 0; d < dim_; ++d) state_[d] ^= directions_[d][c];
  ++index_;
}

}  // namespace ellrisk
