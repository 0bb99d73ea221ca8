import sys

from tandemq.cli import main

sys.exit(main())
