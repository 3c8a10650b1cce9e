import sys

from metastability.cli import main

sys.exit(main())
