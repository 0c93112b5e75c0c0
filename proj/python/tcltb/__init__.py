"""Virtual thermostatically-controlled-load testbed.

The compiled core carries the house model, fleet, telemetry and analyses;
`tcltb.client` is a pure-Python controller client for the TCP protocol.
"""

import os
import sys

try:
    from tcltb._core import *  # noqa: F401,F403
    from tcltb._core import __doc__ as _core_doc  # noqa: F401
except ImportError:  # pragma: no cover - dev-tree fallback
    # In a build tree the extension lives next to the CMake outputs;
    # TCLTB_EXT_DIR points there (used by the ctest harness).
    _ext_dir = os.environ.get("TCLTB_EXT_DIR")
    if not _ext_dir:
        raise
    sys.path.insert(0, _ext_dir)
    from _core import *  # noqa: F401,F403

from tcltb.client import ControllerClient  # noqa: F401,E402
