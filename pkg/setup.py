import os

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # fallback-only install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "nsfts._ckernels",
                [os.path.join("src", "nsfts", "_ckernels.pyx")],
                include_dirs=[np.get_include()],
                # no FMA contraction: the Python fallback must match bitwise
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
