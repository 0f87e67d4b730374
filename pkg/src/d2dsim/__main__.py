import sys

from d2dsim.cli import main

sys.exit(main())
