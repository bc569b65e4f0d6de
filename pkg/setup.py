from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("polysemigroup._series_kernel", ["src/polysemigroup/_series_kernel.pyx"])],
        language_level=3,
    )
except ImportError:
    # pure-Python fallback is selected at import time; the package works without the extension
    ext_modules = []

setup(ext_modules=ext_modules)
