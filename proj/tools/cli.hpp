#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypbdry/exact.hpp"
#include "hypbdry/plane.hpp"
#include "hypbdry/tree.hpp"

namespace hypbdry::cli {

/// Bad flags or model strings; exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  enum class Kind { Free, Plane };
  Kind kind = Kind::Free;
  int rank = 2;
  Rational edge{1};
  PlanePreset preset = PlanePreset::Genus2Octagon;

  /// "free:rank=2,edge=1", "free:rank=3,edge=3/2", "plane:genus2", "plane:triangle237".
  static ModelSpec parse(const std::string& text);
  std::string canonical() const;
};

/// "2..12" (step 1), "8..12:0.5", "3" or "2,4,7".
std::vector<double> parse_t_list(const std::string& text);

/// Comma-separated prefixes ("a,bA"); "all" / "*" for the whole boundary,
/// "none" for the empty set; a leading "!" complements the whole union.
CylinderSet parse_tree_set(const FreeGroup& g, const std::string& text);
/// Comma-separated intervals in turns ("0.1..0.3,0.5..0.6"), same "all",
/// "none" and "!" conventions.
ArcSet parse_arc_set(const std::string& text);
/// Greedy parse over generator names ("a1B1", "x y z"); "e" is the identity.
std::vector<std::size_t> parse_plane_word(const PlaneGroup& g, const std::string& text);

/// Runs the command line; returns the exit status (0 ok, 1 assertion
/// failure, 2 configuration error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hypbdry::cli
