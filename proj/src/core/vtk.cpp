#include "core/vtk.hpp"

#include "core/error.hpp"
#include "core/format.hpp"

#include <fstream>

namespace metawave {

void write_vtk(std::ostream &os, const FieldSolution &sol, const std::string &title) {
  const TriMesh &m = sol.mesh->mesh;
  std::string head = title.substr(0, 255);
  for (char &ch : head)
    if (ch == '\n')
      ch = ' ';
  os << "# vtk DataFile Version 3.0\n" << head << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << m.num_nodes() << " double\n";
  for (const Point2 &p : m.nodes)
    os << fmt17(p.x1) << ' ' << fmt17(p.x2) << " 0\n";
  os << "CELLS " << m.num_tris() << ' ' << 4 * m.num_tris() << '\n';
  for (const auto &t : m.tris)
    os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << m.num_tris() << '\n';
  for (int t = 0; t < m.num_tris(); ++t)
    os << "5\n";
  os << "POINT_DATA " << m.num_nodes() << '\n';
  os << "SCALARS re_u double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < m.num_nodes(); ++v)
    os << fmt17(sol.u[v].real()) << '\n';
  os << "SCALARS im_u double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < m.num_nodes(); ++v)
    os << fmt17(sol.u[v].imag()) << '\n';
  os << "CELL_DATA " << m.num_tris() << '\n';
  os << "SCALARS material int 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < m.num_tris(); ++t)
    os << int(m.metal[t]) << '\n';
}

void write_vtk_file(const std::string &path, const FieldSolution &sol,
                    const std::string &title) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    fail(ErrorCode::resource, "cannot write '" + path + "'");
  write_vtk(out, sol, title);
}

} // namespace metawave
