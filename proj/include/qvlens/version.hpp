#ifndef QVLENS_VERSION_HPP
#define QVLENS_VERSION_HPP

namespace qvlens {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
