from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: install the pure-Python kernels only
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "qecclab._kernels._ckernels",
                ["src/qecclab/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,  # a failed compile falls back to Python at import
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
