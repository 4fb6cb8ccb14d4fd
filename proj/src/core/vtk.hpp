#pragma once

#include "core/helmholtz.hpp"

#include <ostream>
#include <string>

namespace metawave {

/// Legacy ASCII VTK unstructured grid: point scalars re_u, im_u and the
/// cell scalar material (1 inside inclusions).
void write_vtk(std::ostream &os, const FieldSolution &sol, const std::string &title);
void write_vtk_file(const std::string &path, const FieldSolution &sol,
                    const std::string &title);

} // namespace metawave
