"""Build script for the optional compiled q-product kernel.

The kernel links against the GMP/MPFR/MPC libraries that ship inside the
gmpy2 wheel (their sonames are mangled, so we link by exact file name and
set an rpath).  If Cython or the headers are unavailable the build falls
back to a pure-Python package; everything still works, just slower.
"""

import glob
import os

from setuptools import setup


def _kernel_extensions():
    try:
        import gmpy2
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []

    gmpy2_dir = os.path.dirname(gmpy2.__file__)
    if not os.path.exists(os.path.join(gmpy2_dir, "gmpy2.pxd")):
        return []
    libs_dir = os.path.join(os.path.dirname(gmpy2_dir), "gmpy2.libs")
    link_args = []
    if os.path.isdir(libs_dir):
        for pattern in ("libmpc-*", "libmpfr-*", "libgmp-*"):
            for path in sorted(glob.glob(os.path.join(libs_dir, pattern))):
                link_args.append("-l:" + os.path.basename(path))
        if link_args:
            link_args = ["-L" + libs_dir, "-Wl,-rpath," + libs_dir] + link_args
    else:
        # gmpy2 built against system libraries
        link_args = ["-lmpc", "-lmpfr", "-lgmp"]

    ext = Extension(
        "siegelinv._qkernel",
        sources=["src/siegelinv/_qkernel.pyx"],
        include_dirs=[gmpy2_dir],
        extra_link_args=link_args,
    )
    return cythonize([ext], language_level=3)


try:
    extensions = _kernel_extensions()
except Exception:
    extensions = []

setup(ext_modules=extensions)
