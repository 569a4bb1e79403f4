#ifndef LPP_VERSION_HPP
#define LPP_VERSION_HPP

namespace lpp {

inline constexpr const char* kCodeVersion = "lpplab 0.1.0";

}

#endif
