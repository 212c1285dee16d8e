import os
import sys

# When driven by ctest the package lives in the build tree, not site-packages.
pkg_dir = os.environ.get("TORSIM_PYPKG")
if pkg_dir and pkg_dir not in sys.path:
    sys.path.insert(0, pkg_dir)
