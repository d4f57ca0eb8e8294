import os

from setuptools import setup

ext_modules = []
if os.environ.get("TREEAUG_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("treeaug._simplex", ["src/treeaug/_simplex.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []  # pure-Python kernel is used instead

setup(ext_modules=ext_modules)
