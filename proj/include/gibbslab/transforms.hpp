#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/specification.hpp"

namespace gibbslab {

// Strictly positive row-stochastic readout kernel T(out | in).
class Channel {
 public:
  Channel(Alphabet in, Alphabet out, std::vector<double> kernel);  // row-major in x out
  static Channel binary_symmetric(double eps);                     // eps in (0, 1)

  const Alphabet& in() const { return in_; }
  const Alphabet& out() const { return out_; }
  double prob(int in_idx, int out_idx) const {
    return kernel_[static_cast<std::size_t>(in_idx * out_.size() + out_idx)];
  }

 private:
  Alphabet in_, out_;
  std::vector<double> kernel_;
};

// The single-site transformations: subsampling, deterministic symbol merge,
// independent noisy readout, and restriction to a hyperplane.
struct Transform {
  enum class Kind { Decimation, Projection, Channel, Layer } kind = Kind::Decimation;

  int ell = 1;                       // decimation step
  std::vector<int> projection_map;   // input symbol index -> output symbol index
  Alphabet projection_out = Alphabet::ising();
  std::vector<gibbslab::Channel> channel;  // singleton when kind == Channel
  int axis = 0;                      // layer
  int offset = 0;

  static Transform decimation(int ell);
  static Transform projection(const Alphabet& in, const Alphabet& out, const std::vector<int>& symbol_map);
  static Transform channel_kernel(gibbslab::Channel ch);
  static Transform layer(int axis, int offset);

  std::string name() const;
  static Transform parse(const std::string& text, const Alphabet& in = Alphabet::ising());
};

Configuration decimate(const Configuration& input, int ell);
Pattern decimate(const Pattern& input, int ell);

Configuration project(const Configuration& input, const Alphabet& out, const std::vector<int>& symbol_map);

// independent site-wise sampling from the kernel rows; pure in (input, seed)
Configuration channel_apply(const Configuration& input, const Channel& kernel, std::uint64_t seed);

// hyperplane slice as a (d-1)-dimensional configuration
Configuration restrict_layer(const Configuration& input, int axis, int offset);

// Image measure of `base` under the transform. Conditionals are evaluated by
// exact summation over the hidden base layer inside the base window, with the
// base boundary handled as in the base model.
MeasureModel image_model(const MeasureModel& base, const Transform& transform);

}  // namespace gibbslab
