import sys

from lipwalk.cli import main

sys.exit(main())
