#ifndef COBOUNDARY_REARRANGE_HPP
#define COBOUNDARY_REARRANGE_HPP

#include "coboundary/rat.hpp"

#include <cstddef>
#include <vector>

namespace coboundary {

// Bijection on {0..m-1}; image[k] is the original index placed at position k.
class Permutation {
public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> image);

  static Permutation identity(std::size_t n);

  std::size_t size() const { return image_.size(); }
  std::size_t operator[](std::size_t k) const { return image_[k]; }
  const std::vector<std::size_t>& image() const { return image_; }

  bool operator==(const Permutation& o) const { return image_ == o.image_; }

private:
  std::vector<std::size_t> image_;
};

// Orders a zero-sum vector so every prefix sum stays within max|a_k|.
// Greedy: start with index 0, then repeatedly append the lowest unused index
// whose value opposes the sign of the running sum (lowest index outright
// when the running sum is zero). The prefix bound is asserted on the result.
Permutation rearrange_zero_sum(const std::vector<Rat>& a);

struct MatrixRearrangement {
  std::vector<Permutation> rows;
  // Highest strategy tier that was needed across rows: 0 = sorted greedy at
  // target C, 1 = matching at C, 2.. = matching at relaxed targets up to 2C.
  int max_tier = 0;
  std::vector<Rat> column_sums; // final partial sums, |.| <= 2C
};

// For an n x m matrix with zero row sums and |entries| <= C, produces row
// permutations keeping every running column sum within 2C. The 2C bound is a
// checked postcondition, never assumed.
MatrixRearrangement rearrange_matrix(const std::vector<std::vector<Rat>>& a);

} // namespace coboundary

#endif
