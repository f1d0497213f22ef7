#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chemoloc/grid.hpp"

namespace chemoloc {

// Text-grid format:
//   FIELD nx ny Lx Ly
//   <nx values for row j=0, the bottom row>
//   ...
//   <nx values for row j=ny-1>
// Values are written with 17 significant digits so a write/read cycle is
// bit-exact.
void write_text_grid(std::ostream& os, const Field& f);
void write_text_grid(const std::string& path, const Field& f);
Field read_text_grid(std::istream& is);
Field read_text_grid(const std::string& path);

// Binary PGM (P5, maxval 255). Values are scaled linearly from
// [min(f), max(f)] onto 0..255; a constant field maps to 0. Rows are
// emitted top-to-bottom (j = ny-1 first) so the image is oriented with
// y increasing upward.
void write_pgm(std::ostream& os, const Field& f);
void write_pgm(const std::string& path, const Field& f);

// key=value sidecar, one pair per line, written in the order given.
void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

// 17-significant-digit decimal form of a double (shortest exact round trip
// is not required, 17 digits always suffice).
std::string format_double(double v);

}  // namespace chemoloc
