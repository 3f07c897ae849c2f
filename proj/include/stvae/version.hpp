#ifndef STVAE_VERSION_HPP
#define STVAE_VERSION_HPP

namespace stvae {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace stvae

#endif
