#include "stokpp/errors.hpp"

namespace stokpp {

InstabilityError::InstabilityError(const std::string& what, std::int64_t step, std::int64_t node)
    : Error(what + " (step " + std::to_string(step) +
            (node >= 0 ? ", node " + std::to_string(node) : std::string{}) + ")"),
      step_(step),
      node_(node) {}

}  // namespace stokpp
