#pragma once

#include <string>

#include "gibbslab/interaction.hpp"

namespace gibbslab {

// potential syntax: ising:<beta>[:h=<h>], afm:<beta>, zero
Interaction parse_phi(const std::string& text, int dim);

// 12 significant digits, C locale, used by every emitted table
std::string format_g12(double v);

}  // namespace gibbslab
