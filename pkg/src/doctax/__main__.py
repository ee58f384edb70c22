import sys

from doctax.cli import main

sys.exit(main())
