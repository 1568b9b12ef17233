"""Builds the _core extension by driving the project's CMake build."""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        # get_ext_fullpath ends in .../marketsim/_core<suffix>; the module and
        # the package __init__.py are staged into its directory.
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        configure = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            f"-DCMAKE_BUILD_TYPE={os.environ.get('MARKETSIM_CMAKE_BUILD_TYPE', 'Release')}",
            f"-DMARKETSIM_PYTHON_OUTPUT_DIR={out_dir}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DMARKETSIM_BUILD_TESTS=OFF",
        ]
        subprocess.run(configure, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core",
             "--parallel", str(os.cpu_count() or 2)],
            check=True,
        )


setup(
    packages=["marketsim"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("marketsim._core")],
    cmdclass={"build_ext": CMakeBuild},
)
