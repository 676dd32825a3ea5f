#pragma once

#include <istream>
#include <string>

#include "lpsens/matrix.hpp"

namespace lpsens {

// Comma-separated numeric rows. A first line whose first field is not a number
// is treated as a header and skipped. Blank lines are ignored.
Matrix load_csv(const std::string& path);
Matrix parse_csv(std::istream& in, const std::string& source = "<stream>");

void write_csv(std::ostream& out, const Matrix& A);

}  // namespace lpsens
