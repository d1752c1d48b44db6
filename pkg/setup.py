import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; the NumPy kernel is used
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "polar_mismatch._sc_ext",
                ["src/polar_mismatch/_sc_ext.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
