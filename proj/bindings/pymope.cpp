#include <pybind11/pybind11.h>

PYBIND11_MODULE(pymope, m) { m.doc() = "placeholder"; }
