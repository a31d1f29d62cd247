#include "triplateau/obj_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace triplateau {

void write_obj(const std::string& path, const TriMesh& mesh,
               const Positions& positions) {
  if (positions.rows() != mesh.vertex_count())
    throw std::invalid_argument("positions do not match the mesh");
  if (positions.cols() > 3)
    throw std::invalid_argument("OBJ export supports at most 3 coordinates");
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int v = 0; v < positions.rows(); ++v) {
    const double x = positions(v, 0);
    const double y = positions.cols() > 1 ? positions(v, 1) : 0.0;
    const double z = positions.cols() > 2 ? positions(v, 2) : 0.0;
    std::fprintf(out, "v %.17g %.17g %.17g\n", x, y, z);
  }
  for (const auto& tri : mesh.triangles)
    std::fprintf(out, "f %d %d %d\n", tri[0] + 1, tri[1] + 1, tri[2] + 1);
  std::fclose(out);
}

ObjData read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Eigen::Vector3d> vertices;
  ObjData data;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      Eigen::Vector3d p;
      if (!(ss >> p(0) >> p(1) >> p(2)))
        throw std::runtime_error("malformed vertex line in " + path);
      vertices.push_back(p);
    } else if (tag == "f") {
      std::array<int, 3> f;
      if (!(ss >> f[0] >> f[1] >> f[2]))
        throw std::runtime_error("malformed face line in " + path);
      for (int& idx : f) {
        if (idx < 1 || idx > static_cast<int>(vertices.size()) + 1000000)
          throw std::runtime_error("face index out of range in " + path);
        --idx;
      }
      data.faces.push_back(f);
    }
  }
  data.positions.resize(vertices.size(), 3);
  for (std::size_t v = 0; v < vertices.size(); ++v)
    data.positions.row(static_cast<int>(v)) = vertices[v];
  for (const auto& f : data.faces)
    for (int idx : f)
      if (idx >= static_cast<int>(vertices.size()))
        throw std::runtime_error("face index out of range in " + path);
  return data;
}

}  // namespace triplateau
