"""Allow ``python -m ldqfi`` to behave like the ``qfi`` console script."""

from __future__ import annotations

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
