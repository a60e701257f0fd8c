#pragma once

#include "cvloc/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

// Plain-text covariance-matrix files:
//
//   cv-cm v1 N=<n> convention=xp-interleaved-vacuum1
//   <2N whitespace-separated decimals>   (2N rows)
//
// Optional comment lines start with '#'; a line `# labels: a b c` before the
// matrix attaches per-mode labels. Written with 17 significant digits so a
// write/read round trip is bit-exact.

namespace cvloc {

inline constexpr const char* kCMConvention = "xp-interleaved-vacuum1";

struct ParseError : std::runtime_error {
  int line = 0;
  int column = 0;

  ParseError(const std::string& msg, int line_, int column_ = 0)
      : std::runtime_error("line " + std::to_string(line_) +
                           (column_ > 0 ? ", column " + std::to_string(column_)
                                        : std::string()) +
                           ": " + msg),
        line(line_),
        column(column_) {}
};

struct CMFile {
  CovarianceMatrix cm;
  std::vector<std::string> labels;  // empty or one per mode
};

CMFile read_cm(std::istream& in);
CMFile read_cm_file(const std::string& path);

void write_cm(std::ostream& out, const CMFile& f);
void write_cm_file(const std::string& path, const CMFile& f);

}  // namespace cvloc
