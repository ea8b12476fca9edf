#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "dydw/errors.hpp"

namespace dydw {

// A point of the even lattice Z^2_even.  x runs horizontally (space),
// t vertically (path time); x + t must be even.
struct SiteAddress {
    int x = 0;
    int t = 0;

    friend bool operator==(const SiteAddress&, const SiteAddress&) = default;
    friend auto operator<=>(const SiteAddress&, const SiteAddress&) = default;
};

inline bool is_even_site(SiteAddress s) { return ((s.x + s.t) & 1) == 0; }

inline void require_even_site(SiteAddress s, const char* what = "site") {
    if (!is_even_site(s))
        throw ParityError(std::string(what) + " (" + std::to_string(s.x) + "," +
                          std::to_string(s.t) + ") is not in Z^2_even");
}

// Which of the two independent webs an arrow belongs to.
enum class WebId : std::uint32_t { main = 0, secondary = 1 };

inline const char* web_id_name(WebId id) {
    return id == WebId::main ? "main" : "secondary";
}

}  // namespace dydw

template <>
struct std::hash<dydw::SiteAddress> {
    std::size_t operator()(const dydw::SiteAddress& s) const noexcept {
        std::uint64_t v = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) |
                          static_cast<std::uint32_t>(s.t);
        v ^= v >> 33;
        v *= 0xff51afd7ed558ccdULL;
        v ^= v >> 33;
        return static_cast<std::size_t>(v);
    }
};
