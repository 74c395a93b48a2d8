#include "paretonas/rng.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

namespace paretonas {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Rejection sampling on the largest multiple of n below 2^64.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t x = next();
    if (x < limit) return x % n;
  }
}

std::string Rng::save() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

Rng Rng::restore(const std::string& state) {
  Rng rng;
  std::istringstream in(state);
  in >> rng.engine_;
  if (in.fail()) throw std::runtime_error("malformed rng state");
  return rng;
}

}  // namespace paretonas
