#ifndef BPINT_VERSION_HPP
#define BPINT_VERSION_HPP

namespace bpint {

inline constexpr const char* version_string = "1.0.0";

} // namespace bpint

#endif
