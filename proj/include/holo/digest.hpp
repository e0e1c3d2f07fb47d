#pragma once

#include <string>
#include <string_view>

namespace holo {

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Exact, locale-independent text for a double (C99 hexfloat).
std::string hexfloat(double v);

}  // namespace holo
