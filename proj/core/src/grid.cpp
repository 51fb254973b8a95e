#include "oarseg/grid.hpp"

namespace oarseg {

std::string to_string(const Shape3& s) {
  return std::to_string(s.d) + "x" + std::to_string(s.h) + "x" + std::to_string(s.w);
}

}  // namespace oarseg
