import sys

from magnetocasimir.cli import main

sys.exit(main())
