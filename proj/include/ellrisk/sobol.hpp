#pragma once

#include <cstdint>
#include <vector>

namespace ellrisk {

// Sobol sequence in up to 16 dimensions (Joe-Kuo direction numbers), Gray-code
// order, with an optional random digital shift per coordinate.
class Sobol {
 public:
  static constexpr int kMaxDim = 16;

  explicit Sobol(int dim, std::vector<std::uint32_t> shift = {});

  int dim() const { return dim_; }
  // Writes the next point into out[0..dim) with coordinates in (0, 1).
  void next(double* out);

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shift_;
  std::vector<std::vector<std::uint32_t>> directions_;
};

}  // namespace ellrisk
