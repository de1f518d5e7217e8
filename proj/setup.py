import glob
import os

import pybind11
from setuptools import Extension, setup

eigen = next(
    (d for d in ("/usr/include/eigen3", "/usr/local/include/eigen3")
     if os.path.isdir(d)),
    "/usr/include/eigen3",
)

setup(
    ext_modules=[
        Extension(
            "rnm",
            sources=["bindings/pymodule.cpp"] + sorted(glob.glob("src/*.cpp")),
            include_dirs=["include", "vendor", eigen, pybind11.get_include()],
            language="c++",
            extra_compile_args=["-O2", "-std=c++20", "-fvisibility=hidden"],
        )
    ]
)
