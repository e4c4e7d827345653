"""Joint power allocation and energy cooperation for renewable-powered CoMP clusters."""

import os
from pathlib import Path

_data = Path(__file__).with_name("data")
if _data.is_dir():
    os.environ.setdefault("ECOOP_DATA_DIR", str(_data))

from ._ecoop import *  # noqa: E402,F401,F403

__version__ = "0.1.0"
