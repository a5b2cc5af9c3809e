import os

from setuptools import setup

# The compiled kernels are an optional accelerator: if Cython or a C compiler
# is unavailable the package installs anyway and falls back to the numpy
# implementations in aggsculpt.kernels._ref.
ext_modules = []
if not os.environ.get("AGGSCULPT_SKIP_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/aggsculpt/kernels/_fast.pyx",
            language_level=3,
        )
        for ext in ext_modules:
            ext.include_dirs.append(np.get_include())
    except ImportError:
        pass

setup(ext_modules=ext_modules)
