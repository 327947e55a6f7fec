"""Build script for the optional compiled kernels.

If Cython, numpy headers or a C compiler are missing the package still
installs and runs on the pure numpy fallback.
"""
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        print(f"warning: not building compiled kernels ({exc})", file=sys.stderr)
        return []
    random_lib = os.path.join(os.path.dirname(np.__file__), "random", "lib")
    ext = Extension(
        "csl_neutrino._accel",
        ["src/csl_neutrino/_accel.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[random_lib],
        libraries=["npyrandom"],
        extra_compile_args=["-O3", "-fno-math-errno"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or failing
            print(f"warning: compiled kernels not built ({exc}); using numpy fallback",
                  file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); using numpy fallback",
                  file=sys.stderr)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
