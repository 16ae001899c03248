import sys

from brachistochrone_tangle.cli import main

sys.exit(main())
