#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "netquery/error.hpp"
#include "netquery/text.hpp"

namespace netquery {

/// IPv4 address in host byte order.
struct Ipv4 {
  std::uint32_t value = 0;

  auto operator<=>(const Ipv4&) const = default;

  static std::optional<Ipv4> parse(std::string_view s) {
    std::uint32_t out = 0;
    int parts = 0;
    std::size_t i = 0;
    while (parts < 4) {
      std::size_t j = i;
      while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
      if (j == i || j - i > 3) return std::nullopt;
      auto octet = text::parse_int(s.substr(i, j - i));
      if (!octet || *octet > 255) return std::nullopt;
      out = (out << 8) | static_cast<std::uint32_t>(*octet);
      ++parts;
      if (parts < 4) {
        if (j >= s.size() || s[j] != '.') return std::nullopt;
        i = j + 1;
      } else {
        i = j;
      }
    }
    if (i != s.size()) return std::nullopt;
    return Ipv4{out};
  }

  std::string str() const {
    return std::to_string((value >> 24) & 0xff) + "." + std::to_string((value >> 16) & 0xff) + "." +
           std::to_string((value >> 8) & 0xff) + "." + std::to_string(value & 0xff);
  }
};

inline std::uint32_t mask_bits(int length) {
  return length == 0 ? 0u : ~std::uint32_t{0} << (32 - length);
}

/// Dotted-quad netmask to prefix length; nullopt for non-contiguous masks.
inline std::optional<int> mask_length(Ipv4 mask) {
  for (int len = 0; len <= 32; ++len)
    if (mask_bits(len) == mask.value) return len;
  return std::nullopt;
}

/// An address together with a mask length. Host bits are kept: interface
/// addresses such as 1.0.25.2/24 are valid values; `network()` canonicalizes.
struct Ipv4Prefix {
  Ipv4 address;
  int length = 32;

  auto operator<=>(const Ipv4Prefix&) const = default;

  Ipv4Prefix network() const { return {Ipv4{address.value & mask_bits(length)}, length}; }
  bool is_canonical() const { return (address.value & ~mask_bits(length)) == 0; }
  bool contains(Ipv4 ip) const { return (ip.value & mask_bits(length)) == (address.value & mask_bits(length)); }

  std::string str() const { return address.str() + "/" + std::to_string(length); }

  /// Parses "a.b.c.d/len". IPv6 text is rejected with InvalidPrefix.
  static Ipv4Prefix parse(std::string_view s) {
    auto p = try_parse(s);
    if (!p) throw Error(ErrorCode::InvalidPrefix, "not an IPv4 prefix: '" + std::string(s) + "'");
    return *p;
  }

  static std::optional<Ipv4Prefix> try_parse(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto ip = Ipv4::parse(s.substr(0, slash));
    auto len = text::parse_int(s.substr(slash + 1));
    if (!ip || !len || *len < 0 || *len > 32) return std::nullopt;
    return Ipv4Prefix{*ip, static_cast<int>(*len)};
  }

  /// "1.0.25.2 255.255.255.0" style.
  static std::optional<Ipv4Prefix> from_mask(std::string_view ip, std::string_view mask) {
    auto a = Ipv4::parse(ip);
    auto m = Ipv4::parse(mask);
    if (!a || !m) return std::nullopt;
    auto len = mask_length(*m);
    if (!len) return std::nullopt;
    return Ipv4Prefix{*a, *len};
  }
};

/// Network address of a prefix under its own mask.
inline Ipv4Prefix subnet_of(const Ipv4Prefix& p) { return p.network(); }

/// OSPF-style "network A W" statement: address plus wildcard (inverse) mask.
struct WildcardRange {
  Ipv4 base;
  Ipv4 wildcard;

  bool covers(Ipv4 ip) const { return (ip.value & ~wildcard.value) == (base.value & ~wildcard.value); }
};

}  // namespace netquery
