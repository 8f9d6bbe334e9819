"""Build script: compiles the optional fast filter/smoother kernel.

The package works without the extension (a pure-numpy fallback is selected
at import time), so the build is allowed to fail softly when no compiler
or Cython is available.
"""

from setuptools import Extension, setup

extensions = []
try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "specreg._kernel._fast",
                ["src/specreg/_kernel/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=extensions)
