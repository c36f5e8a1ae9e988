"""Build script. The compiled pairwise kernels are optional: if Cython or a C
compiler is unavailable the package falls back to the pure-numpy backend."""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/blayer/_kernels.pyx",
        compiler_directives={"language_level": 3},
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"blayer: skipping compiled kernels ({exc}); pure-python fallback will be used")

setup(ext_modules=ext_modules)
