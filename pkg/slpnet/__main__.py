"""Allow ``python -m slpnet``."""

import sys

from slpnet.main import main

if __name__ == "__main__":
    sys.exit(main())
