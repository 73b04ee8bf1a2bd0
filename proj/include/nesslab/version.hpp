// version.hpp — Build version string

#pragma once

#ifndef NESSLAB_VERSION
#define NESSLAB_VERSION "0.0.0"
#endif

namespace nesslab {

inline constexpr const char* code_version() { return NESSLAB_VERSION; }

} // namespace nesslab
