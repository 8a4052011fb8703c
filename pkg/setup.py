from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [Extension(name="ulm._kernels", sources=["src/ulm/_kernels.pyx"])]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
