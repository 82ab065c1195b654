# Standard
import sys

# Local
from .cli import main

sys.exit(main())
