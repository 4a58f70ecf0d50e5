"""Allow ``python -m bandsel ...`` as an alias of the console script."""

import sys

from bandsel.cli import main

sys.exit(main())
