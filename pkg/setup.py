import numpy as np
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension("vibropair._kernel", ["src/vibropair/_kernel.pyx"],
                   include_dirs=[np.get_include()])],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback backend is used when the extension is absent.
    ext_modules = []

setup(ext_modules=ext_modules)
