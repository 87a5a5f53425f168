import sys

from ftoracle.cli import main

sys.exit(main())
