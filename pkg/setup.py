"""Build hook: compiles the optional Cython kernel.

The package works without the extension (txpsim.kernel falls back to the
pure-Python reference loop), so any build failure here is non-fatal.
"""

from setuptools import Extension, setup


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    try:
        return cythonize(
            [
                Extension(
                    "txpsim._speedups",
                    ["src/txpsim/_speedups.pyx"],
                )
            ],
            language_level=3,
        )
    except Exception:
        return []


setup(ext_modules=extensions())
