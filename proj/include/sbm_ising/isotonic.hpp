#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sbm_ising {

/// Weighted least-squares fit constrained to be nondecreasing (pool adjacent
/// violators). Weights must be positive.
inline std::vector<double> isotonic_nondecreasing(std::span<const double> y, std::span<const double> w) {
  if (y.size() != w.size()) throw std::invalid_argument("isotonic: value/weight size mismatch");
  struct Block {
    double mean, weight;
    std::size_t len;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(w[i] > 0.0)) throw std::invalid_argument("isotonic: weights must be positive");
    blocks.push_back({y[i], w[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double wt = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / wt;
      a.weight = wt;
      a.len += b.len;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.len, b.mean);
  return out;
}

inline std::vector<double> isotonic_nonincreasing(std::span<const double> y, std::span<const double> w) {
  std::vector<double> neg(y.begin(), y.end());
  for (auto& v : neg) v = -v;
  auto fit = isotonic_nondecreasing(neg, w);
  for (auto& v : fit) v = -v;
  return fit;
}

}  // namespace sbm_ising
