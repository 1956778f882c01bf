"""Build script for the optional compiled kernel extension.

The package works without the extension: a pure-Python twin of every
kernel ships alongside it and is selected at import time when the
compiled module is missing.  Building the extension is therefore best
effort; a failed compile downgrades to the pure backend instead of
failing the install.
"""

import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that tolerates a missing or broken C toolchain."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # compile or link error
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print("*" * 72)
        print("WARNING: compiled kernels were not built (%s)." % (exc,))
        print("structbandits will fall back to the pure-Python backend.")
        print("*" * 72)


def make_extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "structbandits._kernels",
        sources=["src/structbandits/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # -O2 without -ffast-math / -march: keep IEEE semantics so the
        # compiled and pure backends produce bit-identical results.
        extra_compile_args=["-O2"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
