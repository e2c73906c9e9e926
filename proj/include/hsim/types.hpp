#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsim {

using NodeId = std::uint32_t;
using UnitId = std::uint32_t;
using KeywordId = std::uint32_t;
using Step = std::int64_t;
using Bytes = std::uint64_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

inline constexpr Bytes kKB = 1000;
inline constexpr Bytes kMB = 1000 * 1000;

// All recoverable failures (bad configuration, impossible placement,
// precondition violations) are reported with this type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hsim
