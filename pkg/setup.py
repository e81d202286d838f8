"""Build script for the optional Cython speedups.

The package works without the extension (a numpy fallback is selected at
import time), so a missing compiler degrades the build instead of failing it.
Set LPTV_SKIP_EXT=1 to skip the extension on purpose.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken toolchain
            print(f"warning: skipping C extension build ({exc}); "
                  "falling back to the pure numpy kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "falling back to the pure numpy kernels")


if os.environ.get("LPTV_SKIP_EXT"):
    ext_modules = []
else:
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython not installed; skipping the C extension and "
              "falling back to the pure numpy kernels")
        ext_modules = []
    else:
        ext_modules = cythonize(
            [Extension("lptv._core._speedups", ["src/lptv/_core/_speedups.pyx"])],
            language_level="3",
        )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
