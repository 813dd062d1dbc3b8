#include "gibbslab/parse.hpp"

#include <cstdio>
#include <vector>

namespace gibbslab {

Interaction parse_phi(const std::string& text, int dim) {
  if (text == "zero") return Interaction::builtin("zero", {}, dim);
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() >= 2 && (parts[0] == "ising" || parts[0] == "afm")) {
    ModelParams params;
    params.beta = std::stod(parts[1]);
    params.h = 0;
    for (std::size_t i = 2; i < parts.size(); ++i) {
      if (parts[i].rfind("h=", 0) == 0)
        params.h = std::stod(parts[i].substr(2));
      else
        throw Error("unknown potential option '" + parts[i] + "'");
    }
    return Interaction::builtin(parts[0] == "ising" ? "ising_ferro" : "ising_afm", params, dim);
  }
  throw Error("unknown potential '" + text + "' (expected ising:<beta>[:h=<h>], afm:<beta>, zero)");
}

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace gibbslab
