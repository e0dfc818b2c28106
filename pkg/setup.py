import os

import numpy as np
from setuptools import Extension, setup

# HKMTEST_NO_EXT=1 skips the compiled core; the package then runs on the
# numpy fallback kernels.
ext_modules = []
if not os.environ.get("HKMTEST_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hkmtest._ckernels",
                ["src/hkmtest/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # no -ffast-math: it would reorder the compensated sums
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
