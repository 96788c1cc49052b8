#pragma once

#include <string>

namespace ocm {

/// Locale-independent rendering with 17 significant digits;
/// round-trips every double exactly.
std::string format_real(double value);

}  // namespace ocm
