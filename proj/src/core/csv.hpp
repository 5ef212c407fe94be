#pragma once

#include <string>

#include "core/types.hpp"

namespace survkit {

// Dataset CSV layout: header `id,time,event,a_0..a_{p-1},b_0..b_{q-1}`,
// UTF-8, comma separated, '.' decimal point, LF newlines. Lines starting
// with '#' before the header are treated as comments and skipped.
Dataset read_csv(const std::string& path);

// `comment` (if nonempty) is written verbatim as the first line; it should
// already carry its leading '#'. Numbers round-trip exactly.
void write_csv(const Dataset& ds, const std::string& path, const std::string& comment = "");

}  // namespace survkit
