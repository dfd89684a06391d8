#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gapcover {

enum class Errc {
  dimension,
  rank,
  singular,
  lattices_differ,
  convergence,
  certification,
  budget,
  representation,
  unsupported,
  parse,
  generation,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::dimension: return "dimension";
    case Errc::rank: return "rank";
    case Errc::singular: return "singular";
    case Errc::lattices_differ: return "lattices_differ";
    case Errc::convergence: return "convergence";
    case Errc::certification: return "certification";
    case Errc::budget: return "budget";
    case Errc::representation: return "representation";
    case Errc::unsupported: return "unsupported";
    case Errc::parse: return "parse";
    case Errc::generation: return "generation";
  }
  return "unknown";
}

/// Every failure in the library is reported as an Error carrying a code and,
/// for pipeline failures, the stage that raised it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::string stage = {})
      : std::runtime_error(what), code_(code), stage_(std::move(stage)) {}

  Errc code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const {
    return Error(code_, what(), std::move(stage));
  }

 private:
  Errc code_;
  std::string stage_;
};

}  // namespace gapcover
