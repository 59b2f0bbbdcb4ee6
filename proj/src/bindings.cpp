#include <pybind11/pybind11.h>
PYBIND11_MODULE(_varlex, m) { m.doc() = "varlex"; }
