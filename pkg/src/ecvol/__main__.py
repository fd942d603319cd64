import sys

from ecvol.cli import main

sys.exit(main())
