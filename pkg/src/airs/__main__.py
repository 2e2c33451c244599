import sys

from airs.cli import main

sys.exit(main())
