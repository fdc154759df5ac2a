"""Allow ``python -m twistedtorus``"""

import sys

from .cli import main

sys.exit(main())
