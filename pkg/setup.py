"""Build the optional compiled matrix kernel.

The package is fully functional without it (kernel_py is the fallback);
the extension just makes the exact-arithmetic hot loops faster.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "opspectra._core.kernel_cy",
                sources=["src/opspectra/_core/kernel_cy.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"opspectra: building without the compiled kernel ({exc})")

setup(ext_modules=ext_modules)
