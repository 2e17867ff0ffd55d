import sys

from fracmat.cli import main

sys.exit(main())
