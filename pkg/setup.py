"""Builds the optional compiled kernels; metadata lives in pyproject.toml."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the numpy fallback in causal_profit._pykernels is used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("causal_profit._ckernels", ["src/causal_profit/_ckernels.pyx"])],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
