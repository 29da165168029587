import sys

from mool.cli import main

sys.exit(main())
