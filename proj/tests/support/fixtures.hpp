#pragma once

// Shared models, grids and packets for the tests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "schwinger/functional.hpp"
#include "schwinger/lattice.hpp"

namespace fixtures {

using schwinger::Grid;
using schwinger::SchwingerFunctional;
using schwinger::TestFunction;

inline Grid default_grid() { return Grid(2, 32, 0.25); }

/// Packet at the box center, width 4a.
TestFunction fixture_packet(const Grid& grid);

SchwingerFunctional free_field(double m2 = 1.0);
SchwingerFunctional two_mass(double m2_a = 1.0, double m2_b = 4.0, double w = 0.5);
/// Quasi-free leaf with a multi-atom spectral measure.
SchwingerFunctional generalized_free();

/// Random mixture tree: depth <= max_depth (root always a mixture), leaves
/// with 1-3 atoms at m^2 in [1, 9] and total spectral mass in [0.5, 1.5].
SchwingerFunctional random_tree(std::uint64_t seed, int max_depth = 3);

struct NamedModel {
  std::string name;
  SchwingerFunctional model;
};
/// The model family used by the cross-method checks.
std::vector<NamedModel> model_family();

/// Fresh empty directory below the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace fixtures
