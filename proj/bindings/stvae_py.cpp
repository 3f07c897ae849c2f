#include <pybind11/pybind11.h>
PYBIND11_MODULE(_stvae, m) { m.doc() = "placeholder"; }
