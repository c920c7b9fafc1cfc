import sys

from lrkm.cli import main

sys.exit(main())
