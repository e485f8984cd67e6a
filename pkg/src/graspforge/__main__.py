import sys

from graspforge.harness.cli import main

sys.exit(main())
