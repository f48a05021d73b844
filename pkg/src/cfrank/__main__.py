import sys

from cfrank.cli import main

sys.exit(main())
