#pragma once

#include <string>

#include "besovkit/decomposition.hpp"

namespace bk {

// Binary grid-function container (little-endian float64 component pairs,
// row-major) with a JSON sidecar mirroring the header.
void write_grid_function(const std::string& path, const GridFunction& f,
                         const std::string& label = "");
GridFunction read_grid_function(const std::string& path);

// Representation container: JSON header + binary coefficient block
// (level, position, quark index, coefficient, unit-direction components);
// harmonic-atomic files append the sparse atom sample blocks.
void write_representation(const std::string& path, const QuarkRepresentation& rep);
void write_representation(const std::string& path, const AtomicRepresentation& rep);

enum class RepKind { quark, harmonic_atomic };
RepKind peek_representation_kind(const std::string& path);
QuarkRepresentation read_quark_representation(const std::string& path);
AtomicRepresentation read_atomic_representation(const std::string& path);

// SpaceParams <-> JSON (infinite p/q encoded as the string "inf")
std::string space_params_to_json(const SpaceParams& prm);
SpaceParams space_params_from_json(const std::string& json);

} // namespace bk
