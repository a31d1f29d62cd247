#pragma once

#include <string>

#include "triplateau/mesh.hpp"

namespace triplateau {

// Writes vertices and faces; positions are printed with 17 significant
// digits so a read-back reproduces the in-memory doubles exactly.  Maps into
// R^2 are padded with z = 0; higher ambient dimensions are rejected.
void write_obj(const std::string& path, const TriMesh& mesh,
               const Positions& positions);

struct ObjData {
  Positions positions;  // rows x 3
  std::vector<std::array<int, 3>> faces;
};

ObjData read_obj(const std::string& path);

}  // namespace triplateau
