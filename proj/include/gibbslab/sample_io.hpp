#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"

namespace gibbslab {

// Binary sample files (see README for the layout). Version 1: little-endian
// header followed by per-sample packed spin indices in volume order; one bit
// per site for two-symbol alphabets, one byte otherwise.
struct SampleFileHeader {
  std::uint16_t version = 1;
  std::uint16_t dim = 1;
  Site lo, hi;               // bounding box of the rectangular volume
  std::vector<int> symbols;  // alphabet in index order
  std::uint64_t seed = 0;
  double t = 0;
  std::uint8_t dynamics = 0;  // 0 spin-flip, 1 exchange
  std::uint32_t reps = 0;
};

void write_samples(const std::string& path, const SampleFileHeader& header,
                   const std::vector<Configuration>& samples);

std::pair<SampleFileHeader, std::vector<Configuration>> read_samples(const std::string& path);

}  // namespace gibbslab
